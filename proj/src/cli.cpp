// cli.cpp: subcommands of the lqfn tool. Every command writes one JSON
// document (or CSV for sweep) to out; diagnostics go to err.

#include "lqfn/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "lqfn/gaussian.hpp"
#include "lqfn/netfile.hpp"

namespace lqfn {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- argument helpers -------------------------------------------------------

Complex parse_complex_arg(const std::string& text, const std::string& what) {
    std::istringstream in(text);
    double re = 0, im = 0;
    char comma = 0;
    in >> re;
    if (in && in.peek() == ',') {
        in >> comma >> im;
    }
    if (!in || !(in >> std::ws).eof()) throw UsageError(what + ": expected RE,IM or a real number, got '" + text + "'");
    return {re, im};
}

// JSON literal if it parses, "RE,IM" as a complex pair, else a plain string.
Json parse_value_arg(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
    }
    if (text.find(',') != std::string::npos) {
        const Complex z = parse_complex_arg(text, "parameter");
        return to_json(z);
    }
    return Json(text);
}

Json parse_params(const std::vector<std::string>& items) {
    Json params = Json::object();
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + item + "'");
        params[item.substr(0, eq)] = parse_value_arg(item.substr(eq + 1));
    }
    return params;
}

// Scalar, [re, im] or nested matrix.
ComplexMatrix matrix_arg(const std::string& text, const std::string& what) {
    const Json j = parse_value_arg(text);
    if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number())) {
        return ComplexMatrix::Constant(1, 1, complex_from_json(j, what));
    }
    return matrix_from_json(j, what);
}

// ---- report pieces ----------------------------------------------------------

Json labels_json(const ModeLabels& labels) {
    Json out = Json::array();
    for (const auto& l : labels) out.push_back(l);
    return out;
}

Json stability_json(const StabilityReport& r) {
    Json out = Json::object();
    out["eigenvalues"] = to_json(r.eigenvalues);
    out["spectral_abscissa"] = r.spectral_abscissa;
    out["verdict"] = r.hurwitz ? "HURWITZ" : "NOT_HURWITZ";
    if (r.closed_form) {
        Json cf = Json::object();
        cf["zeta"] = r.closed_form->zeta;
        cf["gamma_minus"] = r.closed_form->gamma_minus;
        cf["gamma_plus"] = r.closed_form->gamma_plus;
        cf["criterion_1"] = r.closed_form->criterion_1;
        cf["criterion_2"] = r.closed_form->criterion_2;
        cf["eigenvalues"] = to_json(r.closed_form->eigenvalues);
        cf["verdict"] = r.closed_form->hurwitz() ? "HURWITZ" : "NOT_HURWITZ";
        out["closed_form"] = std::move(cf);
    }
    return out;
}

Json component_json(const LinearComponent& g) {
    const StateSpace ss = realize(g);
    const RealizabilityResiduals rr = realizability_residuals(ss);
    Json out = Json::object();
    out["channels"] = g.channels();
    out["modes"] = g.modes();
    out["mode_labels"] = labels_json(g.mode_labels());
    out["S"] = to_json(g.s_tilde());
    out["C"] = to_json(g.c_tilde());
    Json omega = Json::object();
    omega["minus"] = to_json(g.omega().omega_minus());
    omega["plus"] = to_json(g.omega().omega_plus());
    out["Omega"] = std::move(omega);
    out["A"] = to_json(ss.a);
    out["B"] = to_json(ss.b);
    out["stability"] = stability_json(stability(ss));
    Json res = Json::object();
    res["symplectic"] = rr.symplectic;
    res["realizability_ab"] = rr.ab;
    res["realizability_q"] = rr.q;
    out["residuals"] = std::move(res);
    return out;
}

NetworkFile strip_delays(NetworkFile f) {
    for (auto& c : f.connections) c.delay.reset();
    return f;
}

bool has_delay(const NetworkFile& f) {
    for (const auto& c : f.connections) {
        if (c.delay && *c.delay > 0) return true;
    }
    return false;
}

LinearComponent reduce_file(const NetworkFile& f) {
    const CompiledNetwork net = compile(build_graph(strip_delays(f)));
    return zero_delay_reduce(net.partition);
}

// Frequency response of a network file: finite-delay closure when any edge is
// delayed, otherwise the transfer function of the reduced component.
std::function<ComplexMatrix(Complex)> response_of(const NetworkFile& f) {
    const NetworkGraph graph = build_graph(f);
    CompiledNetwork net = compile(graph);
    if (net.delays) {
        auto shared = std::make_shared<CompiledNetwork>(std::move(net));
        return [shared](Complex s) { return finite_delay_response(shared->partition, *shared->delays, s); };
    }
    auto tf = std::make_shared<TransferFunction>(zero_delay_reduce(net.partition));
    return [tf](Complex s) { return (*tf)(s); };
}

void emit(std::ostream& out, const Json& j) { out << dump_json(j) << "\n"; }

// ---- commands ---------------------------------------------------------------

int cmd_validate(const std::string& source, std::ostream& out) {
    const NetworkFile f = load_network(source);
    const NetworkGraph g = build_graph(f);
    const CompiledNetwork net = compile(g);
    Json j = Json::object();
    j["valid"] = true;
    j["components"] = f.components.size();
    j["connections"] = f.connections.size();
    j["external_inputs"] = g.inputs.size();
    j["external_outputs"] = g.outputs.size();
    j["loop_channels"] = net.partition.n2();
    j["modes"] = net.partition.base().modes();
    j["delayed"] = net.delays.has_value();
    emit(out, j);
    return kExitOk;
}

int cmd_reduce(const std::string& source, std::ostream& out) {
    const NetworkFile f = load_network(source);
    Json j = Json::object();
    j["delays_stripped"] = has_delay(f);
    j["component"] = component_json(reduce_file(f));
    emit(out, j);
    return kExitOk;
}

struct SweepOptions {
    double omega_min = 0;
    double omega_max = 0;
    int points = 0;
    std::string scale = "linear";
    std::string format = "csv";
};

std::vector<double> sweep_grid(const SweepOptions& o) {
    if (o.points < 2) throw UsageError("sweep: --points must be at least 2");
    if (!(o.omega_min < o.omega_max)) throw UsageError("sweep: need --omega-min < --omega-max");
    const bool log_scale = o.scale == "log";
    if (log_scale && o.omega_min <= 0) throw UsageError("sweep: log scale needs positive bounds");
    std::vector<double> grid(static_cast<std::size_t>(o.points));
    const double a = log_scale ? std::log(o.omega_min) : o.omega_min;
    const double b = log_scale ? std::log(o.omega_max) : o.omega_max;
    for (int k = 0; k < o.points; ++k) {
        const double t = a + (b - a) * k / (o.points - 1);
        grid[static_cast<std::size_t>(k)] = log_scale ? std::exp(t) : t;
    }
    grid.front() = o.omega_min;
    grid.back() = o.omega_max;
    return grid;
}

int cmd_sweep(const std::string& source, const SweepOptions& o, std::ostream& out) {
    const std::vector<double> grid = sweep_grid(o);
    const NetworkFile f = load_network(source);
    const FrequencySweep sw = sweep_response(response_of(f), grid);

    Index dim = 0;
    for (const auto& v : sw.values) {
        if (v) dim = v->rows();
    }
    if (dim == 0) {
        // every point flagged; size from the channel count
        dim = 2 * compile(build_graph(f)).partition.n1();
    }

    if (o.format == "json") {
        Json rows = Json::array();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            Json row = Json::object();
            row["omega"] = grid[k];
            row["value"] = sw.values[k] ? to_json(*sw.values[k]) : Json(nullptr);
            row["symplectic_residual"] = sw.symplectic_residuals[k];
            row["pole_flag"] = sw.pole_flags[k] ? 1 : 0;
            rows.push_back(std::move(row));
        }
        Json j = Json::object();
        j["scale"] = o.scale;
        j["rows"] = std::move(rows);
        emit(out, j);
        return kExitOk;
    }

    out << "omega";
    for (Index r = 0; r < dim; ++r) {
        for (Index c = 0; c < dim; ++c) out << ",re_" << r + 1 << "_" << c + 1 << ",im_" << r + 1 << "_" << c + 1;
    }
    out << ",symplectic_residual,pole_flag\n";
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out << num(grid[k]);
        for (Index r = 0; r < dim; ++r) {
            for (Index c = 0; c < dim; ++c) {
                const Complex z = sw.values[k] ? (*sw.values[k])(r, c) : Complex(NAN, NAN);
                out << "," << num(z.real()) << "," << num(z.imag());
            }
        }
        out << "," << num(sw.symplectic_residuals[k]) << "," << (sw.pole_flags[k] ? 1 : 0) << "\n";
    }
    return kExitOk;
}

int cmd_tf(const std::string& source, const std::string& s_text, std::ostream& out) {
    const Complex s = parse_complex_arg(s_text, "--s");
    const NetworkFile f = load_network(source);
    const ComplexMatrix value = response_of(f)(s);
    Json j = Json::object();
    j["s"] = to_json(s);
    j["delayed"] = has_delay(f);
    j["value"] = to_json(value);
    j["flat_unitarity_residual"] = flat_unitarity_residual(value);
    emit(out, j);
    return kExitOk;
}

// Component named by a file or by --kind/--param.
LinearComponent component_arg(const std::string& source, const std::string& kind,
                              const std::vector<std::string>& params, const std::string& cmd) {
    if (!source.empty() && !kind.empty()) throw UsageError(cmd + ": give either a file or --kind, not both");
    if (!kind.empty()) return make_component(kind, parse_params(params), kind);
    if (!params.empty()) throw UsageError(cmd + ": --param needs --kind");
    if (source.empty()) throw UsageError(cmd + ": need a file or --kind");
    return reduce_file(load_network(source));
}

int cmd_stability(const LinearComponent& g, std::ostream& out) {
    Json j = Json::object();
    j["modes"] = g.modes();
    j["stability"] = stability_json(stability(g));
    emit(out, j);
    return kExitOk;
}

int cmd_shale(const SymplecticMatrix& s, std::ostream& out) {
    const ShaleFactors<double> f = shale_decompose(s);
    Json j = Json::object();
    Json r = Json::array();
    for (Index k = 0; k < f.r_diag.size(); ++k) r.push_back(f.r_diag(k));
    j["r"] = std::move(r);
    j["s_in"] = to_json(f.s_in);
    j["s_out"] = to_json(f.s_out);
    j["recomposition_residual"] = max_abs(f.recompose() - s.delta());
    emit(out, j);
    return kExitOk;
}

int cmd_araki_woods(const std::string& n_text, const std::string& m_text, std::ostream& out) {
    const ComplexMatrix n = matrix_arg(n_text, "--N");
    const ComplexMatrix m = m_text.empty() ? ComplexMatrix::Zero(n.rows(), n.cols()) : matrix_arg(m_text, "--M");
    const GaussianState state = GaussianState::general(n, m);
    const ArakiWoodsFactors f = araki_woods(state);
    const StatePair back = vacuum_output_state(f.s0());
    Json j = Json::object();
    j["modes"] = state.modes();
    Json eig = Json::array();
    for (Index k = 0; k < f.n_eigenvalues.size(); ++k) eig.push_back(f.n_eigenvalues(k));
    j["n_eigenvalues"] = std::move(eig);
    j["kept_modes"] = f.kept_modes;
    j["X"] = to_json(f.x_mat);
    j["Y"] = to_json(f.y_mat);
    j["Z"] = to_json(f.z_mat);
    j["E0"] = to_json(f.s0());
    Json res = Json::object();
    res["aw2"] = aw2_residual(f);
    res["aw3"] = aw3_residual(f);
    res["reconstruction"] = std::max(max_abs(back.n - n), max_abs(back.m - m));
    j["residuals"] = std::move(res);
    emit(out, j);
    return kExitOk;
}

struct LimitOptions {
    std::string kind = "dpa";
    double k = 1e6;
    double kappa0 = 2;
    double epsilon0 = 1;
    double omega_max = 10;
    int points = 201;
};

int cmd_limit(const LimitOptions& o, std::ostream& out) {
    if (o.points < 2) throw UsageError("limit: --points must be at least 2");
    const LinearComponent amp = dpa(o.k * o.kappa0, o.k * o.epsilon0);
    const LinearComponent target = dpa_static_limit(o.kappa0, o.epsilon0);
    const double r0 = dpa_static_r0(o.kappa0, o.epsilon0);
    const TransferFunction tf(amp);
    const ComplexMatrix limit = embed(target.s_tilde());
    double residual = 0;
    for (int j = 0; j < o.points; ++j) {
        const double w = -o.omega_max + 2 * o.omega_max * j / (o.points - 1);
        residual = std::max(residual, max_abs(tf(Complex(0, w)) - limit));
    }
    const QuadratureResponse q = quadrature_tf(tf(Complex(0, 0)));
    Json j = Json::object();
    j["kind"] = o.kind;
    j["k"] = o.k;
    j["kappa0"] = o.kappa0;
    j["epsilon0"] = o.epsilon0;
    j["r0"] = r0;
    j["omega_max"] = o.omega_max;
    j["points"] = o.points;
    j["residual"] = residual;
    j["gain_x"] = q.xi_x(0, 0).real();
    j["gain_y"] = q.xi_y(0, 0).real();
    j["gain_x_error"] = std::abs(q.xi_x(0, 0) + std::exp(r0));
    j["gain_y_error"] = std::abs(q.xi_y(0, 0) + std::exp(-r0));
    emit(out, j);
    return kExitOk;
}

int cmd_examples(const std::string& show, std::ostream& out) {
    if (!show.empty()) {
        for (const auto& b : bundled_networks()) {
            if (show == b.name) {
                out << b.text;
                return kExitOk;
            }
        }
        throw ValidationError("unknown bundled network '" + show + "'");
    }
    Json list = Json::array();
    for (const auto& b : bundled_networks()) {
        Json e = Json::object();
        e["name"] = std::string("@") + b.name;
        e["description"] = parse_network_text(b.text).description;
        list.push_back(std::move(e));
    }
    emit(out, list);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linear quantum feedback networks with squeezing"};
    app.name("lqfn");
    app.require_subcommand(1);

    std::string source, kind, s_text, show, matrix_text, n_text, m_text;
    std::vector<std::string> params;
    SweepOptions sweep_opts;
    LimitOptions limit_opts;

    auto* validate = app.add_subcommand("validate", "Parse and compile a network file");
    validate->add_option("file", source, "network file, or @name for a bundled one")->required();

    auto* reduce = app.add_subcommand("reduce", "Zero-delay reduction of a network (delays stripped)");
    reduce->add_option("file", source)->required();

    auto* sweep = app.add_subcommand("sweep", "Frequency response on the imaginary axis");
    sweep->add_option("file", source)->required();
    sweep->add_option("--omega-min", sweep_opts.omega_min)->required();
    sweep->add_option("--omega-max", sweep_opts.omega_max)->required();
    sweep->add_option("--points", sweep_opts.points)->required();
    sweep->add_option("--scale", sweep_opts.scale)->check(CLI::IsMember({"linear", "log"}));
    sweep->add_option("--format", sweep_opts.format)->check(CLI::IsMember({"csv", "json"}));

    auto* tf = app.add_subcommand("tf", "Response at one complex frequency");
    tf->add_option("file", source)->required();
    tf->add_option("--s", s_text, "RE,IM")->required();

    auto* stab = app.add_subcommand("stability", "Eigenvalues of A and the Hurwitz verdict");
    stab->add_option("file", source);
    stab->add_option("--kind", kind);
    stab->add_option("--param", params, "key=value");

    auto* shale = app.add_subcommand("shale", "Shale decomposition of a scattering matrix");
    shale->add_option("file", source);
    shale->add_option("--kind", kind);
    shale->add_option("--param", params, "key=value");
    shale->add_option("--matrix", matrix_text, "doubled matrix as JSON {\"minus\": ..., \"plus\": ...}");

    auto* aw = app.add_subcommand("araki-woods", "Araki-Woods factors of a Gaussian state");
    aw->add_option("--N", n_text, "N: number or nested matrix")->required();
    aw->add_option("--M", m_text, "M: number, RE,IM or nested matrix");

    auto* limit = app.add_subcommand("limit", "Static limit of a fast amplifier");
    limit->add_option("--kind", limit_opts.kind)->check(CLI::IsMember({"dpa"}));
    limit->add_option("--k", limit_opts.k);
    limit->add_option("--kappa0", limit_opts.kappa0);
    limit->add_option("--epsilon0", limit_opts.epsilon0);
    limit->add_option("--omega-max", limit_opts.omega_max);
    limit->add_option("--points", limit_opts.points);

    auto* examples = app.add_subcommand("examples", "List bundled network files");
    examples->add_option("--show", show, "print one bundled file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(source, out);
        if (reduce->parsed()) return cmd_reduce(source, out);
        if (sweep->parsed()) return cmd_sweep(source, sweep_opts, out);
        if (tf->parsed()) return cmd_tf(source, s_text, out);
        if (stab->parsed()) return cmd_stability(component_arg(source, kind, params, "stability"), out);
        if (shale->parsed()) {
            if (!matrix_text.empty()) {
                if (!source.empty() || !kind.empty()) throw UsageError("shale: --matrix excludes file and --kind");
                return cmd_shale(SymplecticMatrix(doubled_from_json(parse_value_arg(matrix_text), "--matrix")), out);
            }
            return cmd_shale(component_arg(source, kind, params, "shale").scattering(), out);
        }
        if (aw->parsed()) return cmd_araki_woods(n_text, m_text, out);
        if (limit->parsed()) return cmd_limit(limit_opts, out);
        if (examples->parsed()) return cmd_examples(show, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

}  // namespace lqfn
