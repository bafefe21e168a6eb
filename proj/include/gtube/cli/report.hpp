#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace gtube::cli {

enum class Status { pass, fail, not_evaluated };

std::string to_string(Status s);

struct CheckRecord {
    std::string name;
    std::string anchor;               // formula the check exercises
    Status status = Status::not_evaluated;
    double residual = 0;
    std::optional<std::string> value; // reported quantity, when the check produces one
    std::optional<std::string> component;  // offending index tuple on failure
    std::string note;
};

class Report {
public:
    void set_env(std::string key, std::string value);
    void add(CheckRecord r);
    // Overall verdict written on the summary line; defaults to pass/fail.
    void set_verdict(std::string v) { verdict_ = std::move(v); }

    const std::vector<CheckRecord>& checks() const { return checks_; }
    const CheckRecord& find(const std::string& name) const;
    bool all_passed() const;
    int count(Status s) const;

    // Environment block, checks ordered by name, summary line.
    void write(std::ostream& out) const;
    std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> env_;
    std::vector<CheckRecord> checks_;
    std::optional<std::string> verdict_;
};

// Six significant digits, general notation; "0" for zero.
std::string format_number(double x);

}  // namespace gtube::cli
