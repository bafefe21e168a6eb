#include "gtube/cli/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <thread>

#include "gtube/sampling.hpp"

namespace gtube::cli {

namespace {

using Task = std::function<CheckRecord()>;

// Runs independent checks on a small worker pool; results keep submission order.
std::vector<CheckRecord> run_tasks(const std::vector<Task>& tasks, int threads) {
    std::vector<CheckRecord> out(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < tasks.size();) {
            try {
                out[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int w = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
    if (w == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < w; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

template <class E>
std::string worst_component(const Tensor<E>& t) {
    double best = -1;
    std::size_t arg = 0;
    for (std::size_t o = 0; o < t.size(); ++o) {
        double m;
        if constexpr (std::is_same_v<E, Poly<scalar_of<E>>>) m = t[o].max_abs_coefficient();
        else m = magnitude(t[o]);
        if (m > best) best = m, arg = o;
    }
    int a = 0;
    std::vector<int> idx;
    t.decode(arg, a, idx);
    std::ostringstream s;
    s << '(';
    if (t.vector_valued()) s << a + 1 << ';';
    for (std::size_t m = 0; m < idx.size(); ++m) s << (m ? "," : "") << idx[m] + 1;
    s << ')';
    return s.str();
}

CheckRecord scalar_check(std::string name, std::string anchor, double residual, double tol) {
    CheckRecord r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.residual = residual;
    r.status = std::isfinite(residual) && residual <= tol ? Status::pass : Status::fail;
    return r;
}

template <class E>
CheckRecord tensor_check(std::string name, std::string anchor, const Tensor<E>& residual, double tol) {
    auto r = scalar_check(std::move(name), std::move(anchor), residual.norm(), tol);
    if (r.status == Status::fail) r.component = worst_component(residual);
    return r;
}

CheckRecord value_check(std::string name, std::string anchor, const std::string& got, const std::string& want) {
    CheckRecord r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.value = got;
    r.status = got == want ? Status::pass : Status::fail;
    r.residual = got == want ? 0 : 1;
    if (got != want) r.note = "expected " + want;
    return r;
}

struct Context {
    RunOptions opt;
    double tol;  // identity tolerance in the selected mode
};

template <class S>
std::string show(const S& z) {
    return scalar_traits<S>::to_string(z);
}

// ---------- verify ----------

template <class S>
std::vector<Task> identity_battery(const Context& ctx) {
    using namespace sampling;
    const int n = ctx.opt.n;
    const double tol = ctx.tol;
    const auto seed = ctx.opt.seed;
    const int K = std::max(3, ctx.opt.order);
    std::vector<Task> t;

    t.push_back([=] {
        Rng rng(seed);
        const auto conn = levi_civita(random_metric<S>(rng, n));
        return tensor_check("bianchi.algebraic", "Circ R = 0", circ(curvature(conn)), tol);
    });
    t.push_back([=] {
        Rng rng(seed);
        const auto conn = levi_civita(random_metric<S>(rng, n));
        return tensor_check("bianchi.differential", "Circ nabla R = 0",
                            circ(covariant_derivative(conn, curvature(conn))), tol);
    });
    t.push_back([=] {
        Rng rng(seed);
        const auto g = random_metric<S>(rng, n);
        return tensor_check("levi_civita.compatibility", "nabla g = 0", metric_compatibility(levi_civita(g), g), tol);
    });
    t.push_back([=] {
        Rng rng(seed + 1);
        const auto conn = random_torsion_free<S>(rng, n);
        const auto theta = random_field<S>(rng, n, 2, Valued::vector, 2);
        return tensor_check("curvature.operator", "Alt_2 nabla^2 theta = R.theta",
                            verify_curv_operator(conn, theta).tensor, tol);
    });
    t.push_back([=] {
        Rng rng(seed + 2);
        const auto conn = random_torsion_free<S>(rng, n);
        const auto S1 = random_symmetric_field<S>(rng, n, 2, Valued::vector);
        const auto lhs = curvature(deform(conn, S1));
        const auto rhs = curvature(conn) + d1(conn, S1) + wedge1(S1, S1);
        return tensor_check("curvature.deformation", "R^{S1} = R + d1 S1 + S1 ^1 S1", lhs - rhs, tol);
    });
    t.push_back([=] {
        Rng rng(seed + 3);
        double worst = 0;
        for (int p = 2; p <= 3; ++p) {
            auto th = random_point_tensor<S>(rng, n, p + 1, Valued::vector);
            th = sym(th, slot_range(2, p + 1));
            worst = std::max(worst, alt(alt(th, {1, 2}), {1, 2, 3}).norm());
            const auto beta = alt(th, {1, 2});
            worst = std::max(worst, (alt(alt2_preimage(beta), {1, 2}) - beta).norm());
        }
        return scalar_check("exact_sequence", "Alt_3 Alt_2 = 0; beta = C_p Alt_2 Sym beta", worst, tol);
    });
    t.push_back([=] {
        Rng rng(seed + 4);
        const auto th = random_point_tensor<S>(rng, n, 4, Valued::vector);
        const auto lhs = sym(sym(th, {3, 4}), {2, 3, 4});
        return tensor_check("sym.composition", "Sym_{2..4} Sym_{3,4} = 2 Sym_{2..4}",
                            lhs - sym(th, {2, 3, 4}) * ratio<S>(2), tol);
    });
    t.push_back([=] {
        Rng rng(seed + 5);
        const auto base = random_torsion_free<S>(rng, n, 1, 2);
        const auto S1 = random_symmetric_field<S>(rng, n, 2, Valued::vector, 1, 1);
        std::map<int, TensorField<S>> sigma{{2, random_symmetric_field<S>(rng, n, 3, Valued::vector, 1, 1)}};
        const auto jets = build_jets(base, S1, sigma, K);
        double worst = 0;
        for (int k = 2; k <= K - 1; ++k) worst = std::max(worst, (jets.beta(k) - beta_recursive(jets, k)).norm());
        return scalar_check("jets.beta_cross", "closed-form beta_k = recursive beta_k", worst, tol);
    });
    t.push_back([=] {
        Rng rng(seed + 6);
        const auto g = random_metric<S>(rng, n, 1, 1);
        const auto rj = riemannian_jets(g, 3);
        const auto st = TotallyRealStructure<S>::from_jets(rj.jets);
        double worst = 0;
        for (const auto& eq : per_degree_system(st)) worst = std::max(worst, eq.norm());
        return scalar_check("integrability.per_degree", "per-degree system, degrees < 3", worst, tol);
    });
    t.push_back([=] {
        Rng rng(seed + 7);
        const auto g = random_metric<S>(rng, n, 1, 1);
        const auto st = TotallyRealStructure<S>::from_jets(riemannian_jets(g, 3).jets);
        const auto x = random_point<S>(rng, n), eta = random_point<S>(rng, n);
        const auto main = main_residual(st, x, eta);
        const auto eqs = per_degree_system(st);
        double worst = 0;
        for (int k = 0; k < static_cast<int>(eqs.size()); ++k) {
            const auto want = degree_value(eqs[k], k, x, eta) * degree_weight<S>(k);
            worst = std::max(worst, (main.graded[k] - want).norm());
        }
        return scalar_check("integrability.graded", "main residual = weighted per-degree system", worst, tol);
    });
    t.push_back([=] {
        Rng rng(seed + 8);
        const auto g = random_metric<S>(rng, n, 1, 1);
        const auto st = TotallyRealStructure<S>::from_jets(riemannian_jets(g, 3).jets);
        double worst = 0;
        for (int m = 0; m < 5; ++m) {
            const TangentPoint p(random_reals(rng, n), random_reals(rng, n, 0.2));
            const auto J = eval_J(st, p);
            worst = std::max(worst, (J * J + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff());
            const Eigen::VectorXd v = Eigen::VectorXd::Map(random_reals(rng, n).data(), n);
            Eigen::VectorXd TBv = Eigen::VectorXd::Zero(2 * n);
            TBv.tail(n) = eval_B(st, p) * v;
            worst = std::max(worst, (J * eval_alpha(st, p, v) - TBv).cwiseAbs().maxCoeff());
        }
        return scalar_check("structure.J", "J^2 = -1 and J alpha v = T B v", worst, 1e-10);
    });
    return t;
}

// Checks on one concrete metric.
template <class S>
std::vector<Task> metric_battery(const Context& ctx, const Metric<S>& g) {
    const double tol = ctx.tol;
    std::vector<Task> t;
    const auto ginv = inverse_metric(g, default_inverse_degree(2));
    const auto conn = levi_civita(g, ginv);
    const bool exact_inverse = ginv.exact;
    t.push_back([=] { return tensor_check("bianchi.algebraic", "Circ R = 0", circ(curvature(conn)), tol); });
    t.push_back([=] {
        return tensor_check("bianchi.differential", "Circ nabla R = 0",
                            circ(covariant_derivative(conn, curvature(conn))), tol);
    });
    t.push_back([=] {
        auto c = metric_compatibility(conn, g);
        if (!exact_inverse) {
            auto r = scalar_check("levi_civita.compatibility", "nabla g = 0",
                                  truncated(c, default_inverse_degree(2)).norm(), tol);
            r.note = "inverse metric truncated; residual over degrees <= " + std::to_string(default_inverse_degree(2));
            return r;
        }
        return tensor_check("levi_civita.compatibility", "nabla g = 0", c, tol);
    });
    return t;
}

template <class S>
Report verify(const Context& ctx) {
    Report rep;
    std::vector<Task> tasks;
    if (ctx.opt.spec_path || ctx.opt.target != "identities") {
        const auto doc = resolve_spec(ctx.opt);
        if (doc.kind == SpecKind::metric) {
            tasks = metric_battery<S>(ctx, to_metric<S>(doc));
        } else {
            const auto conn = to_connection<S>(doc);
            const double tol = ctx.tol;
            tasks.push_back([=] {
                auto r = scalar_check("connection.torsion", "torsion = 0", torsion(conn).norm(), tol);
                return r;
            });
            if (conn.torsion_free()) {
                tasks.push_back([=] { return tensor_check("bianchi.algebraic", "Circ R = 0", circ(curvature(conn)), tol); });
                tasks.push_back([=] {
                    return tensor_check("bianchi.differential", "Circ nabla R = 0",
                                        circ(covariant_derivative(conn, curvature(conn))), tol);
                });
            }
        }
    } else {
        tasks = identity_battery<S>(ctx);
    }
    for (auto& r : run_tasks(tasks, ctx.opt.threads)) rep.add(std::move(r));
    return rep;
}

// ---------- jets ----------

// Exact mode: the residual's largest coefficient or value. Float mode: per total degree,
// relative to the balanced quantities, over the degrees the inputs represent faithfully.
template <class S>
CheckRecord identity_check(std::string name, std::string anchor, double exact_residual, const TensorField<S>& residual,
                           const std::vector<TensorField<S>>& parts, int cap, double tol) {
    if constexpr (scalar_traits<S>::exact) {
        auto r = scalar_check(std::move(name), std::move(anchor), exact_residual, tol);
        if (r.status == Status::fail) r.component = worst_component(residual);
        return r;
    } else {
        auto r = scalar_check(std::move(name), std::move(anchor), graded_relative(residual, parts, cap), tol);
        r.note = cap < 0 ? "relative per degree" : "relative per degree, degrees <= " + std::to_string(cap);
        if (r.status == Status::fail) r.component = worst_component(residual);
        return r;
    }
}

template <class S>
Report jets(const Context& ctx) {
    Report rep;
    const auto doc = resolve_spec(ctx.opt);
    const int K = ctx.opt.order;
    const double tol = ctx.tol;
    const int lattice = ctx.opt.lattice;
    int cap = -1;
    std::optional<JetSequence<S>> js;
    if (doc.kind == SpecKind::metric) {
        auto rj = riemannian_jets(to_metric<S>(doc), K);
        rep.add(scalar_check("jets.riemannian_consistency", "S_k from Theta_k = S_k from the recursion",
                             rj.consistency_defect, tol));
        if (rj.inverse_degree >= 0) {
            cap = rj.inverse_degree;
            rep.set_env("inverse_degree", std::to_string(cap));
        }
        for (int k = 4; k <= K; ++k) {
            const auto e = riemannian_obstruction(rj, k, lattice);
            auto r = identity_check<S>("obstruction.riemannian_" + std::to_string(k), "Circ Sym_{3..k+1} Theta_k = 0",
                                       std::max(e.origin_norm, e.lattice_norm), e.tensor,
                                       {sym(rj.Theta[k], slot_range(3, k + 1))}, cap, tol);
            if (e.vanishes_identically) r.status = Status::pass;
            rep.add(std::move(r));
        }
        js.emplace(std::move(rj.jets));
    } else {
        auto in = to_jet_inputs<S>(doc);
        js.emplace(build_jets(in.base, in.S1, in.sigma, K));
    }
    const auto& J = *js;
    std::vector<Task> tasks;
    for (int k = 2; k <= K; ++k)
        tasks.push_back([&J, k, tol] {
            const double d = symmetry_defect(J.S_k(k), slot_range(2, k + 1), false);
            return scalar_check("jets.symmetry_S" + std::to_string(k), "S_k symmetric in its last k slots", d, tol);
        });
    for (int k = 2; k <= K - 1; ++k)
        tasks.push_back([&J, k, cap, tol] {
            const auto rec = beta_recursive(J, k);
            const auto diff = J.beta(k) - rec;
            return identity_check<S>("jets.beta_cross_" + std::to_string(k), "closed-form beta_k = recursive beta_k",
                                     diff.norm(), diff, {J.beta(k), rec}, cap, tol);
        });
    for (const auto& e : J.obstructions())
        tasks.push_back([&J, &e, cap, tol] {
            auto r = identity_check<S>("obstruction.circ_beta_" + std::to_string(e.k + 1), "Circ beta_{k+1} = 0",
                                       std::max(e.origin_norm, e.lattice_norm), e.tensor, {J.beta(e.k + 1)}, cap, tol);
            if (e.vanishes_identically) r.status = Status::pass;
            return r;
        });
    for (auto& r : run_tasks(tasks, ctx.opt.threads)) rep.add(std::move(r));

    const auto st = TotallyRealStructure<S>::from_jets(J);
    const auto eqs = per_degree_system(st);
    const auto parts = per_degree_summands(st);
    for (int k = 0; k < static_cast<int>(eqs.size()); ++k)
        rep.add(identity_check<S>("integrability.degree_" + std::to_string(k), "per-degree integrability equation",
                                  eqs[k].norm(), eqs[k], parts[k], cap, tol));

    // Float mode evaluates at the base origin, where only low-order coefficients contribute.
    constexpr bool exact = scalar_traits<S>::exact;
    sampling::Rng rng(ctx.opt.seed);
    auto x = sampling::random_point<S>(rng, J.dim());
    const auto eta = sampling::random_point<S>(rng, J.dim());
    if (!exact) x.assign(J.dim(), S{});
    const auto main = main_residual(st, x, eta);
    double worst = 0;
    for (int k = 0; k < static_cast<int>(eqs.size()); ++k) {
        const auto want = degree_value(eqs[k], k, x, eta) * degree_weight<S>(k);
        worst = std::max(worst, exact ? (main.graded[k] - want).norm() : relative_defect(main.graded[k], want));
    }
    auto graded = scalar_check("integrability.graded", "main residual = weighted per-degree system", worst, tol);
    if (!exact) graded.note = "relative, base point at the origin";
    rep.add(std::move(graded));
    CheckRecord top;
    top.name = "integrability.degree_" + std::to_string(K);
    top.anchor = "fiber degrees above K";
    top.status = Status::not_evaluated;
    top.residual = main.graded[K].norm();
    top.note = "truncated at order " + std::to_string(K) + "; dropped-degree floor " + format_number(main.dropped_floor);
    rep.add(std::move(top));
    return rep;
}

// ---------- counterexample / obstruct ----------

template <class S>
void counterexample_checks(Report& rep, int n) {
    const auto g = quadratic_example_metric<S>(n);
    const auto rt = rho_theta_obstruction(g);
    long long want = 0;
    for (int s = 2; s <= n; ++s) want += 4LL * (s - 1) * (s - 1);
    const S rho = rt.rho.at(0, {1, 0, 0, 1, 0});
    const S theta = rt.theta.at(0, {0, 1, 1, 0, 0});
    rep.add(value_check("counterexample.rho", "rho^1_{2,1,1,2,1} = 4 sum_{s=2}^n (s-1)^2", show(rho),
                        show(ratio<S>(want))));
    rep.add(value_check("counterexample.theta", "theta^1_{1,2,2,1,1} = 4 rho^1_{2,1,1,2,1}", show(theta),
                        show(rho * ratio<S>(4))));
    rep.set_verdict(rt.theta_vanishes ? "unobstructed" : "obstructed");
}

template <class S>
Report obstruct(const Context& ctx) {
    Report rep;
    const auto doc = resolve_spec(ctx.opt);
    if (doc.kind != SpecKind::metric) throw spec_error("obstruct: expects a metric spec");
    const auto g = to_metric<S>(doc);
    if (doc.builtin == "counterexample") counterexample_checks<S>(rep, doc.dim);
    else rep.set_verdict(rho_theta_obstruction(g).theta_vanishes ? "unobstructed" : "obstructed");
    // Origin values only: Γ through degree 3 is enough.
    const auto fo = first_riemann_obstruction(g, 3, 3);
    auto id = scalar_check("first_obstruction.identity", "Circ Sym_{3,4,5}[3 d1(nabla R)_2 - 2 R~ ^1 R~] = 6 sum R^(j,p)",
                           fo.identity_residual, ctx.tol);
    if (id.status == Status::fail) id.component = worst_component(truncated(fo.tensor - fo.curvature_sum * ratio<S>(6), 0));
    id.note = "origin values";
    rep.add(std::move(id));
    CheckRecord f;
    f.name = "first_obstruction.value";
    f.anchor = "Circ Sym_{3,4,5}[3 d1(nabla R)_2 - 2 R~ ^1 R~] at the origin";
    f.status = Status::pass;
    f.residual = fo.origin_norm;
    f.value = format_number(fo.origin_norm);
    f.note = "6 sum R^(j,p) at the origin has size " + format_number(fo.sum_norm * 6);
    rep.add(std::move(f));
    return rep;
}

template <class S>
Report counterexample(const Context& ctx) {
    Report rep;
    counterexample_checks<S>(rep, ctx.opt.n);
    return rep;
}

// ---------- flow ----------

Report flow(const Context& ctx) {
    using S = cfloat;
    Report rep;
    const auto doc = resolve_spec(ctx.opt);
    if (doc.kind != SpecKind::metric) throw spec_error("flow: expects a metric spec");
    const auto g = to_metric<S>(doc);
    const int n = g.dim();
    const NumericMetric ng(g);
    const NumericForms forms(g);
    sampling::Rng rng(ctx.opt.seed);
    const TangentPoint start(sampling::random_reals(rng, n, 0.2), sampling::random_reals(rng, n, 0.5));
    const auto traj = geodesic_flow(ng, start, ctx.opt.flow_time, ctx.opt.step);
    double drift = 0;
    const double e0 = energy(ng, start);
    for (const auto& p : traj) drift = std::max(drift, std::abs(energy(ng, p) - e0));
    rep.add(scalar_check("flow.energy", "g(v, v) constant along geodesics", drift, 1e-8));
    if (doc.builtin == "euclidean") {
        double dev = 0;
        const auto& end = traj.back();
        for (int a = 0; a < n; ++a)
            dev = std::max(dev, std::abs(end.x[a] - (start.x[a] + ctx.opt.flow_time * start.v[a])));
        rep.add(scalar_check("flow.straight_line", "x(T) = x0 + T v0", dev, 1e-12));
    }
    double sc = 0, rb = 0;
    for (int m = 0; m < 20; ++m) {
        const TangentPoint p(sampling::random_reals(rng, n), sampling::random_reals(rng, n));
        sc = std::max(sc, verify_symplectic_connector(ng, forms, p, sampling::random_reals(rng, 2 * n, 1.0),
                                                      sampling::random_reals(rng, 2 * n, 1.0)));
        rb = std::max(rb, reeb_check(forms, p));
    }
    rep.add(scalar_check("symplectic.connector", "Omega = g(dpi, K) - g(dpi, K) swapped", sc, 1e-10));
    rep.add(scalar_check("symplectic.reeb", "i_Xi Omega = theta with Xi = (0, -v)", rb, 1e-10));

    const int K = std::max(2, ctx.opt.order);
    const auto st = TotallyRealStructure<S>::from_jets(riemannian_jets(g, K).jets);
    double hol = 0;
    for (int m = 0; m < 20; ++m) {
        const TangentPoint p(sampling::random_reals(rng, n, 0.1), sampling::random_reals(rng, n, 0.5));
        const auto h = holomorphy_check(st, p);
        for (int k = 1; k < static_cast<int>(h.per_degree.size()); ++k) hol = std::max(hol, h.per_degree[k]);
    }
    rep.add(scalar_check("holomorphy.jets", "S_k(eta^{k+1}) = 0", hol, 1e-9));
    double cr = 0;
    for (int m = 0; m < 5; ++m) {
        const TangentPoint p(sampling::random_reals(rng, n, 0.2), sampling::random_reals(rng, n, 0.5));
        cr = std::max(cr, psi_CR_residual(st, ng, p, 0.05, 0.05, ctx.opt.step));
    }
    auto c = scalar_check("holomorphy.leaf_cr", "J d psi(d_t) = d psi(d_s)", cr, doc.builtin == "euclidean" ? 1e-10 : 1e-5);
    c.note = "|t + i s| <= 0.1, order " + std::to_string(K);
    rep.add(std::move(c));
    return rep;
}

template <class S>
Report dispatch(const Context& ctx) {
    const auto& c = ctx.opt.command;
    if (c == "verify") return verify<S>(ctx);
    if (c == "jets") return jets<S>(ctx);
    if (c == "obstruct") return obstruct<S>(ctx);
    throw rejected_input("unknown command '" + c + "'");
}

}  // namespace

void merge_spec_options(RunOptions& opt, const SpecOptions& spec, const ExplicitFlags& set) {
    if (spec.mode && !set.mode) opt.mode = *spec.mode;
    if (spec.order && !set.order) opt.order = *spec.order;
    if (spec.tol && !set.tol) opt.tol = spec.tol;
    if (spec.lattice && !set.lattice) opt.lattice = *spec.lattice;
    if (spec.step && !set.step) opt.step = *spec.step;
}

SpecDocument resolve_spec(const RunOptions& opt) {
    if (opt.spec_path) return load_spec(*opt.spec_path);
    if (opt.target.empty()) throw rejected_input("no spec: give a built-in target or --spec PATH");
    return builtin_spec(opt.target, opt.n);
}

Report run(const RunOptions& in) {
    RunOptions opt = in;
    if (opt.command == "counterexample") opt.mode = "exact";
    if (opt.command == "flow") opt.mode = "float";
    if (opt.mode != "exact" && opt.mode != "float") throw rejected_input("mode must be exact or float");
    if (opt.order < 2 || opt.order > 6) throw rejected_input("order must lie in 2..6");
    if (opt.n < 1 || opt.n > 5) throw rejected_input("n must lie in 1..5");
    if (opt.lattice < 1) throw rejected_input("lattice must be positive");
    if (!(opt.step > 0)) throw rejected_input("step must be positive");
    const bool exact = opt.mode == "exact";
    Context ctx{opt, opt.tol ? *opt.tol : (exact ? 0.0 : 1e-9)};

    Report rep;
    if (opt.command == "flow") rep = flow(ctx);
    else if (opt.command == "counterexample") rep = counterexample<qcomplex>(ctx);
    else rep = exact ? dispatch<qcomplex>(ctx) : dispatch<cfloat>(ctx);

    rep.set_env("command", opt.command);
    rep.set_env("target", opt.spec_path ? *opt.spec_path : opt.target);
    rep.set_env("n", std::to_string(opt.n));
    rep.set_env("mode", opt.mode);
    rep.set_env("order", std::to_string(opt.order));
    rep.set_env("tol", format_number(ctx.tol));
    rep.set_env("seed", std::to_string(opt.seed));
    rep.set_env("lattice", std::to_string(opt.lattice));
    rep.set_env("step", format_number(opt.step));
    if (opt.command == "flow") rep.set_env("T", format_number(opt.flow_time));
    // R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z.
    rep.set_env("curvature_sign", "+1");
    return rep;
}

int exit_code(const Report& r) { return r.all_passed() ? 0 : 1; }

std::string resolve_output_path(const std::string& out) {
    const std::filesystem::path p(out);
    if (p.is_absolute()) return out;
    if (const char* dir = std::getenv("GTUBE_OUT_DIR"); dir && *dir) return (std::filesystem::path(dir) / p).string();
    return out;
}

int threads_from_env() {
    if (const char* t = std::getenv("GTUBE_THREADS"); t && *t) {
        try {
            return std::max(1, std::stoi(t));
        } catch (const std::exception&) {
            throw rejected_input(std::string("GTUBE_THREADS is not an integer: ") + t);
        }
    }
    return 1;
}

}  // namespace gtube::cli
