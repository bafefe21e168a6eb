#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "gtube/cli/runner.hpp"

namespace {

// Positional key=value words (n=2, seed=1, T=1) after the target.
void apply_word(gtube::cli::RunOptions& opt, const std::string& word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) throw gtube::rejected_input("unexpected argument '" + word + "'");
    const auto key = word.substr(0, eq), val = word.substr(eq + 1);
    try {
        if (key == "n") opt.n = std::stoi(val);
        else if (key == "seed") opt.seed = std::stoull(val);
        else if (key == "T") opt.flow_time = std::stod(val);
        else throw gtube::rejected_input("unknown setting '" + key + "'");
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const gtube::rejected_input*>(&e)) throw;
        throw gtube::rejected_input("cannot parse '" + word + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jet recursion and integrability checks for adapted complex structures on tangent bundles"};
    app.require_subcommand(1);
    gtube::cli::RunOptions opt;
    std::vector<std::string> words;
    std::string out;
    std::string spec;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"verify", "identity battery (target: identities, euclidean, counterexample, or --spec)"},
        {"jets", "build jets and report per-degree residuals and obstructions"},
        {"obstruct", "counterexample values and the first Riemannian obstruction"},
        {"flow", "geodesic flow, symplectic and holomorphy checks"},
        {"counterexample", "the quadratic example metric's values (exact mode)"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("target", opt.target, "built-in target");
        sub->add_option("settings", words, "key=value settings: n=, seed=, T=");
        sub->add_option("--spec", spec, "spec file");
        sub->add_option("--mode", opt.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
        sub->add_option("--order", opt.order, "jet order K");
        sub->add_option("--tol", opt.tol, "identity tolerance");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--lattice", opt.lattice, "lattice points per axis");
        sub->add_option("--step", opt.step, "integration step");
        sub->add_option("--out", out, "report path (default: stdout)");
    }
    CLI11_PARSE(app, argc, argv);
    opt.command = app.get_subcommands().front()->get_name();
    auto* sub = app.get_subcommands().front();
    auto given = [&](const char* f) { return sub->get_option(std::string("--") + f)->count() > 0; };

    try {
        // A lone key=value word lands in the target slot.
        if (opt.target.find('=') != std::string::npos) {
            words.insert(words.begin(), opt.target);
            opt.target.clear();
        }
        for (const auto& w : words) apply_word(opt, w);
        if (opt.target.empty() && spec.empty()) opt.target = opt.command == "verify" ? "identities" : "counterexample";
        if (!spec.empty()) {
            opt.spec_path = spec;
            const auto doc = gtube::cli::load_spec(spec);
            opt.n = doc.dim;
            gtube::cli::ExplicitFlags set{given("mode"), given("order"), given("tol"), given("lattice"), given("step")};
            gtube::cli::merge_spec_options(opt, doc.options, set);
        }
        opt.threads = gtube::cli::threads_from_env();
        const auto report = gtube::cli::run(opt);
        if (out.empty()) {
            report.write(std::cout);
        } else {
            const auto path = gtube::cli::resolve_output_path(out);
            std::ofstream f(path);
            if (!f) throw std::runtime_error("cannot write report to " + path);
            report.write(f);
        }
        return gtube::cli::exit_code(report);
    } catch (const std::exception& e) {
        std::cerr << "gtube: " << e.what() << '\n';
        return 2;
    }
}
