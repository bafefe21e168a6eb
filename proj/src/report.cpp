#include "gtube/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace gtube::cli {

std::string to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::not_evaluated: return "not-evaluated";
    }
    return "?";
}

std::string format_number(double x) {
    if (x == 0) return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
    if (ec != std::errc{}) throw std::runtime_error("format_number failed");
    return std::string(buf, end);
}

void Report::set_env(std::string key, std::string value) {
    for (auto& kv : env_)
        if (kv.first == key) {
            kv.second = std::move(value);
            return;
        }
    env_.emplace_back(std::move(key), std::move(value));
}

void Report::add(CheckRecord r) {
    for (const auto& c : checks_)
        if (c.name == r.name) throw std::logic_error("duplicate check name " + r.name);
    checks_.push_back(std::move(r));
}

const CheckRecord& Report::find(const std::string& name) const {
    for (const auto& c : checks_)
        if (c.name == name) return c;
    throw std::out_of_range("no check named " + name);
}

bool Report::all_passed() const {
    return std::none_of(checks_.begin(), checks_.end(), [](const auto& c) { return c.status == Status::fail; });
}

int Report::count(Status s) const {
    return static_cast<int>(std::count_if(checks_.begin(), checks_.end(), [s](const auto& c) { return c.status == s; }));
}

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string bare_or_quoted(const std::string& s) {
    return s.find_first_of(" \t\"=") == std::string::npos && !s.empty() ? s : quoted(s);
}

}  // namespace

void Report::write(std::ostream& out) const {
    out << "env";
    for (const auto& [k, v] : env_) out << ' ' << k << '=' << bare_or_quoted(v);
    out << '\n';
    auto sorted = checks_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    for (const auto& c : sorted) {
        out << "check name=" << c.name << " anchor=" << quoted(c.anchor) << " status=" << to_string(c.status)
            << " residual=" << format_number(c.residual);
        if (c.value) out << " value=" << bare_or_quoted(*c.value);
        if (c.component) out << " component=" << *c.component;
        if (!c.note.empty()) out << " note=" << quoted(c.note);
        out << '\n';
    }
    const std::string verdict = verdict_ ? *verdict_ : (all_passed() ? "pass" : "fail");
    out << "summary status=" << verdict << " checks=" << checks_.size() << " pass=" << count(Status::pass)
        << " fail=" << count(Status::fail) << " not_evaluated=" << count(Status::not_evaluated) << '\n';
}

std::string Report::str() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
}

}  // namespace gtube::cli
