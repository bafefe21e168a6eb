#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gtube/gtube.hpp"

namespace gtube::cli {

enum class SpecKind { metric, connection, jets };

std::string to_string(SpecKind k);

// One polynomial coefficient of one tensor component. Indices are 1-based as written.
struct SpecEntry {
    std::string field;             // "g", "gamma", "S1" or "sigmaK"
    std::vector<int> component;    // output index first for vector-valued fields
    std::vector<int> exponents;    // length dim
    std::string re = "0";
    std::string im = "0";
    int line = 0;
};

struct SpecOptions {
    std::optional<std::string> mode;
    std::optional<int> order;
    std::optional<double> step;
    std::optional<int> lattice;
    std::optional<double> tol;
};

struct SpecDocument {
    SpecKind kind = SpecKind::metric;
    int dim = 0;
    std::string source;            // file path or built-in name
    std::string builtin;           // "euclidean", "counterexample" or empty
    std::vector<SpecEntry> entries;
    SpecOptions options;
};

// Thrown for unreadable, malformed or inconsistent spec documents.
class spec_error : public rejected_input {
public:
    using rejected_input::rejected_input;
};

SpecDocument parse_spec(std::istream& in, const std::string& source);
SpecDocument load_spec(const std::string& path);
// "euclidean" or "counterexample" in dimension n.
SpecDocument builtin_spec(const std::string& name, int n);

namespace detail {

inline int slots_of(const std::string& field) {
    if (field == "g" || field == "gamma" || field == "S1") return 2;
    return std::stoi(field.substr(5)) + 1;
}

template <class S>
TensorField<S> assemble(const SpecDocument& doc, const std::string& field, Valued valued, int arity) {
    auto f = zero_field<S>(doc.dim, arity, valued, doc.dim);
    for (const auto& e : doc.entries) {
        if (e.field != field) continue;
        const S c = scalar_traits<S>::from_text(e.re, e.im);
        auto mono = Poly<S>::monomial(doc.dim, std::span<const int>(e.exponents), c);
        const int a = valued == Valued::vector ? e.component[0] - 1 : 0;
        std::vector<int> idx;
        for (std::size_t m = valued == Valued::vector ? 1 : 0; m < e.component.size(); ++m) idx.push_back(e.component[m] - 1);
        f[f.offset(a, std::span<const int>(idx))] += mono;
        // Metric entries name an unordered pair.
        if (field == "g" && idx[0] != idx[1]) {
            std::swap(idx[0], idx[1]);
            f[f.offset(a, std::span<const int>(idx))] += mono;
        }
    }
    return f;
}

}  // namespace detail

template <class S>
Metric<S> to_metric(const SpecDocument& doc) {
    if (doc.kind != SpecKind::metric) throw spec_error(doc.source + ": expected kind metric");
    if (doc.builtin == "euclidean") return Metric<S>::euclidean(doc.dim);
    if (doc.builtin == "counterexample") return quadratic_example_metric<S>(doc.dim);
    try {
        return Metric<S>(detail::assemble<S>(doc, "g", Valued::scalar, 2));
    } catch (const spec_error&) {
        throw;
    } catch (const rejected_input& e) {
        throw spec_error(doc.source + ": " + e.what());
    }
}

template <class S>
Connection<S> to_connection(const SpecDocument& doc) {
    if (doc.kind == SpecKind::metric) return levi_civita(to_metric<S>(doc));
    return Connection<S>(detail::assemble<S>(doc, "gamma", Valued::vector, 2));
}

template <class S>
struct JetInputs {
    Connection<S> base;
    TensorField<S> S1;
    std::map<int, TensorField<S>> sigma;
};

template <class S>
JetInputs<S> to_jet_inputs(const SpecDocument& doc) {
    auto base = to_connection<S>(doc);
    auto S1 = detail::assemble<S>(doc, "S1", Valued::vector, 2);
    std::map<int, TensorField<S>> sigma;
    for (const auto& e : doc.entries)
        if (e.field.rfind("sigma", 0) == 0) {
            const int k = detail::slots_of(e.field) - 1;
            if (!sigma.count(k)) sigma.emplace(k, detail::assemble<S>(doc, e.field, Valued::vector, k + 1));
        }
    return {std::move(base), std::move(S1), std::move(sigma)};
}

}  // namespace gtube::cli
