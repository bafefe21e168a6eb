#include "gtube/cli/spec.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace gtube::cli {

std::string to_string(SpecKind k) {
    switch (k) {
        case SpecKind::metric: return "metric";
        case SpecKind::connection: return "connection";
        case SpecKind::jets: return "jets";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class LineError {
public:
    LineError(std::string source, int line) : where_(std::move(source) + ":" + std::to_string(line) + ": ") {}
    [[noreturn]] void fail(const std::string& msg) const { throw spec_error(where_ + msg); }

private:
    std::string where_;
};

std::vector<int> parse_int_list(const std::string& text, const LineError& err, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            err.fail("field '" + key + "': '" + item + "' is not an integer");
        }
        if (used != item.size()) err.fail("field '" + key + "': '" + item + "' is not an integer");
        out.push_back(v);
    }
    if (out.empty()) err.fail("field '" + key + "' is empty");
    return out;
}

template <class T>
T parse_number(const std::string& text, const LineError& err, const std::string& key) {
    std::istringstream ss(text);
    T v{};
    ss >> v;
    if (!ss || !ss.eof()) err.fail("option '" + key + "': cannot parse '" + text + "'");
    return v;
}

bool valid_field(const std::string& f, SpecKind kind) {
    if (f == "g") return kind == SpecKind::metric;
    if (f == "gamma") return kind != SpecKind::metric;
    if (f == "S1") return kind == SpecKind::jets;
    if (f.rfind("sigma", 0) == 0 && kind == SpecKind::jets && f.size() > 5) {
        for (std::size_t i = 5; i < f.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(f[i]))) return false;
        return std::stoi(f.substr(5)) >= 2;
    }
    return false;
}

SpecEntry parse_entry(std::istringstream& rest, const LineError& err) {
    SpecEntry e;
    std::string tok;
    std::set<std::string> seen;
    while (rest >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) err.fail("entry token '" + tok + "' is not key=value");
        const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (!seen.insert(key).second) err.fail("entry repeats field '" + key + "'");
        if (key == "field") e.field = val;
        else if (key == "component") e.component = parse_int_list(val, err, key);
        else if (key == "exponents") e.exponents = parse_int_list(val, err, key);
        else if (key == "re") e.re = val;
        else if (key == "im") e.im = val;
        else err.fail("entry has unknown field '" + key + "'");
    }
    for (const char* req : {"field", "component", "exponents"})
        if (!seen.count(req)) err.fail(std::string("entry is missing field '") + req + "'");
    return e;
}

void validate(SpecDocument& doc, const std::vector<int>& lines) {
    if (doc.dim < 1) throw spec_error(doc.source + ": missing or invalid 'dim'");
    std::set<std::tuple<std::string, std::vector<int>, std::vector<int>>> keys;
    for (std::size_t m = 0; m < doc.entries.size(); ++m) {
        auto& e = doc.entries[m];
        const LineError err(doc.source, lines[m]);
        const std::string path = "entry[" + std::to_string(m) + "]";
        if (!valid_field(e.field, doc.kind))
            err.fail(path + ".field: '" + e.field + "' not allowed for kind " + to_string(doc.kind));
        const int want = detail::slots_of(e.field) + (e.field == "g" ? 0 : 1);
        if (static_cast<int>(e.component.size()) != want)
            err.fail(path + ".component: expected " + std::to_string(want) + " indices for field " + e.field);
        for (int c : e.component)
            if (c < 1 || c > doc.dim) err.fail(path + ".component: index " + std::to_string(c) + " outside 1.." +
                                               std::to_string(doc.dim));
        if (static_cast<int>(e.exponents.size()) != doc.dim)
            err.fail(path + ".exponents: length " + std::to_string(e.exponents.size()) + " differs from dim " +
                     std::to_string(doc.dim));
        for (int x : e.exponents)
            if (x < 0) err.fail(path + ".exponents: negative exponent");
        try {
            (void)scalar_traits<qcomplex>::from_text(e.re, e.im);
        } catch (const std::exception& ex) {
            err.fail(path + ".re/im: " + ex.what());
        }
        auto comp = e.component;
        if (e.field == "g" && comp[0] > comp[1]) std::swap(comp[0], comp[1]);
        if (!keys.emplace(e.field, comp, e.exponents).second)
            err.fail(path + ": duplicate coefficient (metric pairs are unordered)");
    }
    if (doc.options.mode && *doc.options.mode != "exact" && *doc.options.mode != "float")
        throw spec_error(doc.source + ": option 'mode' must be exact or float");
}

}  // namespace

SpecDocument parse_spec(std::istream& in, const std::string& source) {
    SpecDocument doc;
    doc.source = source;
    std::vector<int> entry_lines;
    bool have_kind = false;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const LineError err(source, lineno);
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "entry") {
            auto e = parse_entry(ss, err);
            e.line = lineno;
            doc.entries.push_back(std::move(e));
            entry_lines.push_back(lineno);
            continue;
        }
        std::string value, extra;
        if (!(ss >> value)) err.fail("key '" + key + "' has no value");
        if (ss >> extra) err.fail("key '" + key + "' has trailing text '" + extra + "'");
        if (key == "kind") {
            if (value == "metric") doc.kind = SpecKind::metric;
            else if (value == "connection") doc.kind = SpecKind::connection;
            else if (value == "jets") doc.kind = SpecKind::jets;
            else err.fail("unknown kind '" + value + "'");
            have_kind = true;
        } else if (key == "dim") {
            doc.dim = parse_number<int>(value, err, key);
        } else if (key == "mode") {
            doc.options.mode = value;
        } else if (key == "order") {
            doc.options.order = parse_number<int>(value, err, key);
        } else if (key == "step") {
            doc.options.step = parse_number<double>(value, err, key);
        } else if (key == "lattice") {
            doc.options.lattice = parse_number<int>(value, err, key);
        } else if (key == "tol") {
            doc.options.tol = parse_number<double>(value, err, key);
        } else {
            err.fail("unknown key '" + key + "'");
        }
    }
    if (!have_kind) throw spec_error(source + ": missing 'kind'");
    validate(doc, entry_lines);
    return doc;
}

SpecDocument load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_error(path + ": cannot open spec file");
    return parse_spec(in, path);
}

SpecDocument builtin_spec(const std::string& name, int n) {
    if (name != "euclidean" && name != "counterexample") throw spec_error("unknown built-in spec '" + name + "'");
    if (n < 1 || n > 6) throw spec_error("built-in spec '" + name + "': n must lie in 1..6");
    SpecDocument doc;
    doc.kind = SpecKind::metric;
    doc.dim = n;
    doc.builtin = name;
    doc.source = name + " n=" + std::to_string(n);
    return doc;
}

}  // namespace gtube::cli
