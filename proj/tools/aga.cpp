// aga: command-line harness over the library.
//
//   aga sweep-voiculescu --n-min 2 --n-max 64
//   aga flow --builtin z2-perturbed --n 4 --seed 7
//   aga flow --builtin voiculescu --n 8
//   aga surface-reduce --genus 2 --n 4 --epsilon 0.05 --seed 3
//   aga lift --random-start --n 3 --seed 11 --samples 200 --delta 1e-3
//   aga winding --u u.json --v v.json
//   aga obstruction --a a.json --b b.json --n-small 2 --m-pad 100 --eps-prime 0.01
//   aga parse presentation.txt
//
// Exit codes: 0 success, 1 operation failure, 2 usage error.
// Matrix files hold one {"n": n, "entries": [[re, im], ...]} object (row-major);
// representation files hold {"presentation": text, "n": n, "assignment": {generator: matrix}};
// c-path files hold one matrix object per line.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aga/aga.hpp"

namespace fs = std::filesystem;
using aga::io::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::optional<std::uint64_t> seed;
    std::string format = "table";
    std::string out;
    std::optional<double> tolerance;
    std::optional<std::size_t> budget;
    bool dry_run = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "RNG seed (required by randomized inputs)");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
    sub->add_option("--out", c.out, "Output directory (default ./out/<subcommand>-<timestamp>)");
    sub->add_option("--tolerance", c.tolerance, "Convergence tolerance");
    sub->add_option("--budget", c.budget, "Step budget");
    sub->add_flag("--dry-run", c.dry_run, "Validate inputs and print the resolved configuration");
}

std::uint64_t require_seed(const Common& c, const std::string& what) {
    if (!c.seed) throw UsageError(what + " is randomized: pass --seed");
    return *c.seed;
}

fs::path output_dir(const Common& c, const std::string& sub) {
    if (!c.out.empty()) return c.out;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    std::ostringstream os;
    os << sub << '-' << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return fs::path("out") / os.str();
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw aga::Error("cannot write " + (dir / name).string());
    return f;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw aga::Error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw aga::Error(path + ": " + e.what());
    }
}

aga::UnitaryMatrix read_unitary(const std::string& path) {
    try {
        return aga::io::unitary_from_json(read_json_file(path));
    } catch (const aga::PreconditionError& e) {
        throw aga::Error(path + ": " + e.what());
    }
}

aga::AlmostRep read_rep(const std::string& path) {
    try {
        return aga::io::rep_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw aga::Error(path + ": " + e.what());
    }
}

// Rendering of flat records.

std::string cell(const ordered_json& v, bool full_precision) {
    if (v.is_number_float()) {
        if (full_precision) return aga::io::format_double(v.get<double>());
        std::ostringstream os;
        os << std::setprecision(10) << v.get<double>();
        return os.str();
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_rows(std::ostream& out, const std::string& format, const std::vector<ordered_json>& rows) {
    if (format == "json") {
        out << aga::io::dump17(ordered_json(rows)) << '\n';
        return;
    }
    if (rows.empty()) return;
    std::vector<std::string> cols;
    for (auto it = rows.front().begin(); it != rows.front().end(); ++it) cols.push_back(it.key());
    if (format == "csv") {
        for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
        out << '\n';
        for (const auto& r : rows) {
            for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << csv_escape(cell(r.at(cols[k]), true));
            out << '\n';
        }
        return;
    }
    std::vector<std::size_t> width(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        width[k] = cols[k].size();
        for (const auto& r : rows) width[k] = std::max(width[k], cell(r.at(cols[k]), false).size());
    }
    auto line = [&](auto&& text_of) {
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const std::string t = text_of(k);
            out << t;
            if (k + 1 < cols.size()) out << std::string(width[k] - t.size() + 2, ' ');
        }
        out << '\n';
    };
    line([&](std::size_t k) { return cols[k]; });
    for (const auto& r : rows) line([&](std::size_t k) { return cell(r.at(cols[k]), false); });
}

/// A single record: key=value lines for table, header + row for csv, one object for json.
void write_record(std::ostream& out, const std::string& format, const ordered_json& rec) {
    if (format == "json") {
        out << aga::io::dump17(rec) << '\n';
    } else if (format == "csv") {
        write_rows(out, "csv", {rec});
    } else {
        for (auto it = rec.begin(); it != rec.end(); ++it) out << it.key() << '=' << cell(it.value(), false) << '\n';
    }
}

void write_summary_file(const fs::path& dir, const ordered_json& rec) {
    auto f = open_output(dir, "summary.json");
    f << aga::io::dump17(rec) << '\n';
}

void announce(const fs::path& dir) { std::cerr << "wrote " << dir.string() << '\n'; }

// sweep-voiculescu

struct SweepArgs {
    Common c;
    int n_min = 2;
    int n_max = 16;
};

ordered_json sweep_row(int n) {
    const aga::AlmostRep rep = aga::voiculescu_family(n);
    const auto& a = rep.at("a");
    ordered_json row;
    row["n"] = n;
    row["defect"] = aga::defect_value(rep);
    if (const auto w = aga::try_winding(a, rep.at("c")))
        row["winding"] = *w;
    else
        row["winding"] = "undefined (branch cut)";
    row["lacuna"] = aga::spectral_lacuna(a).gap;
    row["halfplane_count"] = aga::halfplane_count(rep.at("b")).count;
    return row;
}

int run_sweep(const SweepArgs& s) {
    if (!(2 <= s.n_min && s.n_min <= s.n_max && s.n_max <= 512))
        throw UsageError("sweep-voiculescu: need 2 <= n-min <= n-max <= 512");
    if (s.c.dry_run) {
        ordered_json cfg{{"subcommand", "sweep-voiculescu"}, {"n_min", s.n_min}, {"n_max", s.n_max}};
        write_record(std::cout, s.c.format, cfg);
        return 0;
    }
    std::vector<ordered_json> rows;
    for (int n = s.n_min; n <= s.n_max; ++n) rows.push_back(sweep_row(n));
    const fs::path dir = output_dir(s.c, "sweep-voiculescu");
    {
        auto f = open_output(dir, "sweep.csv");
        write_rows(f, "csv", rows);
    }
    write_rows(std::cout, s.c.format, rows);
    announce(dir);
    return 0;
}

// flow

struct FlowArgs {
    Common c;
    std::string rep_file;
    std::string builtin;
    int n = 8;
    double magnitude = 0.2;
    std::size_t stride = 10;
    bool track = true;
};

std::string constancy(const std::vector<std::string>& values) {
    if (values.empty()) return "none";
    for (const auto& v : values)
        if (v != values.front()) return "varies";
    return "constant " + values.front();
}

void add_invariant_summary(ordered_json& rec, const aga::FlowTrace& trace) {
    if (trace.invariant_log.empty()) return;
    for (std::size_t p = 0; p < trace.winding_pairs.size(); ++p) {
        std::vector<std::string> vals;
        for (const auto& s : trace.invariant_log)
            vals.push_back(s.windings[p] ? std::to_string(*s.windings[p]) : std::string("undefined"));
        rec["winding_" + trace.winding_pairs[p].first + "_" + trace.winding_pairs[p].second] = constancy(vals);
    }
    for (std::size_t g = 0; g < trace.involutions.size(); ++g) {
        std::vector<std::string> vals;
        for (const auto& s : trace.invariant_log) vals.push_back(std::to_string(s.halfplanes[g].count));
        rec["halfplane_" + trace.involutions[g]] = constancy(vals);
    }
}

aga::AlmostRep flow_input(const FlowArgs& f) {
    if (f.rep_file.empty() == f.builtin.empty()) throw UsageError("flow: pass exactly one of --rep or --builtin");
    if (!f.rep_file.empty()) return read_rep(f.rep_file);
    if (f.n < 1) throw UsageError("flow: --n must be positive");
    if (f.builtin == "voiculescu") {
        if (f.n < 2) throw UsageError("flow: voiculescu needs --n >= 2");
        return aga::voiculescu_family(f.n);
    }
    if (!(f.magnitude > 0.0 && f.magnitude < 0.5)) throw UsageError("flow: --magnitude must lie in (0, 0.5)");
    return aga::perturbed_commuting_rep(f.n, f.magnitude, require_seed(f.c, "--builtin z2-perturbed"));
}

int run_flow(const FlowArgs& f) {
    const aga::AlmostRep rep = flow_input(f);
    aga::FlowConfig cfg;
    if (f.c.budget) cfg.budget = *f.c.budget;
    if (f.c.tolerance) cfg.tolerance = *f.c.tolerance;
    if (f.stride == 0) throw UsageError("flow: --stride must be positive");
    cfg.stride = f.stride;
    cfg.track_invariants = f.track;
    if (f.c.dry_run) {
        ordered_json r{{"subcommand", "flow"},
                       {"input", f.rep_file.empty() ? f.builtin : f.rep_file},
                       {"presentation", rep.presentation().name()},
                       {"n", rep.dimension()},
                       {"budget", cfg.budget},
                       {"tolerance", cfg.tolerance},
                       {"stride", cfg.stride},
                       {"track_invariants", cfg.track_invariants}};
        if (f.c.seed) r["seed"] = *f.c.seed;
        write_record(std::cout, f.c.format, r);
        return 0;
    }
    const aga::FlowTrace trace = aga::flow_minimize(rep, cfg);
    const fs::path dir = output_dir(f.c, "flow");
    {
        auto csv = open_output(dir, "trace.csv");
        aga::io::write_trace_csv(csv, trace);
        auto jl = open_output(dir, "trace.jsonl");
        aga::io::write_trace_jsonl(jl, trace);
    }
    ordered_json rec{{"status", aga::to_string(trace.status)},
                     {"final_defect", trace.back().defect},
                     {"steps", trace.steps},
                     {"initial_defect", trace.samples.front().defect},
                     {"samples", trace.samples.size()}};
    add_invariant_summary(rec, trace);
    write_summary_file(dir, rec);
    write_record(std::cout, f.c.format, rec);
    announce(dir);
    return trace.status == aga::FlowStatus::diverged ? 1 : 0;
}

// surface-reduce

struct SurfaceArgs {
    Common c;
    std::string rep_file;
    int genus = 2;
    int n = 4;
    double epsilon = 0.05;
    std::optional<double> delta;
};

int run_surface(const SurfaceArgs& s) {
    aga::AlmostRep rep = [&] {
        if (!s.rep_file.empty()) return read_rep(s.rep_file);
        if (s.genus < 2 || s.n < 1) throw UsageError("surface-reduce: need --genus >= 2 and --n >= 1");
        if (!(s.epsilon > 0.0 && s.epsilon <= 0.2)) throw UsageError("surface-reduce: --epsilon must lie in (0, 0.2]");
        return aga::near_genuine_surface_rep(s.genus, s.n, s.epsilon, require_seed(s.c, "a generated surface input"));
    }();
    aga::SurfaceReduceConfig cfg;
    cfg.delta = s.delta;
    if (s.c.seed) cfg.seed = *s.c.seed;
    cfg.lift.seed = cfg.seed;
    if (s.c.tolerance) cfg.finish.tolerance = *s.c.tolerance;
    if (s.c.budget) cfg.finish.budget = *s.c.budget;
    if (s.c.dry_run) {
        const auto m = aga::surface_genus(rep.presentation());
        if (!m) throw aga::PreconditionError("surface-reduce: input is not over a surface presentation");
        ordered_json r{{"subcommand", "surface-reduce"},
                       {"genus", *m},
                       {"n", rep.dimension()},
                       {"initial_defect", aga::defect_value(rep)},
                       {"finish_budget", cfg.finish.budget},
                       {"finish_tolerance", cfg.finish.tolerance}};
        if (s.delta) r["delta"] = *s.delta;
        if (s.c.seed) r["seed"] = *s.c.seed;
        write_record(std::cout, s.c.format, r);
        return 0;
    }
    const aga::FlowTrace trace = aga::surface_reduce(rep, cfg);
    const fs::path dir = output_dir(s.c, "surface-reduce");
    {
        auto csv = open_output(dir, "trace.csv");
        aga::io::write_trace_csv(csv, trace);
        auto jl = open_output(dir, "trace.jsonl");
        aga::io::write_trace_jsonl(jl, trace);
    }
    const auto& end = trace.back().rep;
    double tail = 0.0;
    for (std::size_t i = 2; i < end.assignment().size(); ++i)
        tail = std::max(tail, aga::operator_norm(end.at(i).matrix() -
                                                 aga::Matrix::Identity(end.dimension(), end.dimension())));
    ordered_json rec{{"status", aga::to_string(trace.status)},
                     {"initial_defect", trace.samples.front().defect},
                     {"max_defect", trace.max_defect()},
                     {"final_defect", trace.back().defect},
                     {"distance_to_identity", tail},
                     {"samples", trace.samples.size()}};
    write_summary_file(dir, rec);
    write_record(std::cout, s.c.format, rec);
    announce(dir);
    return 0;
}

// lift

struct LiftArgs {
    Common c;
    std::string u_file, v_file, c_path_file;
    bool random_start = false;
    int n = 3;
    double scale = 0.015;
    std::size_t samples = 200;
    double delta = 1e-3;
};

int run_lift(const LiftArgs& l) {
    if (!(l.delta > 0.0)) throw UsageError("lift: --delta must be positive");
    aga::UnitaryMatrix u = aga::UnitaryMatrix::identity(1), v = u;
    if (l.random_start) {
        if (!l.u_file.empty() || !l.v_file.empty()) throw UsageError("lift: --random-start excludes --u/--v");
        if (l.n < 2) throw UsageError("lift: --n must be >= 2");
        std::tie(u, v) = aga::random_irreducible_pair_near_commuting(l.n, l.scale, require_seed(l.c, "--random-start"));
    } else {
        if (l.u_file.empty() || l.v_file.empty()) throw UsageError("lift: pass --u and --v, or --random-start");
        u = read_unitary(l.u_file);
        v = read_unitary(l.v_file);
        if (u.dim() != v.dim()) throw aga::PreconditionError("lift: u and v differ in dimension");
    }
    std::vector<aga::UnitaryMatrix> path;
    if (!l.c_path_file.empty()) {
        std::ifstream in(l.c_path_file);
        if (!in) throw aga::Error("cannot open " + l.c_path_file);
        path = aga::io::read_matrix_lines(in);
    } else {
        if (l.samples < 2) throw UsageError("lift: --samples must be >= 2");
        path = aga::su_geodesic_to_identity(aga::gamma_commutator(u, v), l.samples);
    }
    aga::LiftConfig cfg;
    if (l.c.seed) cfg.seed = *l.c.seed;
    if (l.c.budget) cfg.corrector_budget = *l.c.budget;
    if (l.c.dry_run) {
        if (const auto gap = aga::first_path_gap_violation(path, cfg.density_fraction * l.delta))
            throw aga::PreconditionError("lift: c-path samples " + std::to_string(gap->index - 1) + " and " +
                                         std::to_string(gap->index) + " are " + std::to_string(gap->gap) +
                                         " apart, more than " + std::to_string(cfg.density_fraction * l.delta));
        ordered_json r{{"subcommand", "lift"},
                       {"n", u.dim()},
                       {"path_samples", path.size()},
                       {"delta", l.delta},
                       {"corrector_budget", cfg.corrector_budget},
                       {"seed", cfg.seed}};
        write_record(std::cout, l.c.format, r);
        return 0;
    }
    const aga::ContinuationResult res = aga::lift_commutator_path(u, v, path, l.delta, cfg);
    const fs::path dir = output_dir(l.c, "lift");
    {
        auto csv = open_output(dir, "lift.csv");
        aga::io::write_lift_csv(csv, res);
        auto jl = open_output(dir, "lift.jsonl");
        aga::io::write_lift_jsonl(jl, res);
    }
    const bool ok = res.status == aga::LiftStatus::success;
    ordered_json rec{{"status", ok ? "success" : "stalled"},
                     {"max_residual", res.max_residual},
                     {"samples", res.lifted_path.size()},
                     {"retries", res.retries},
                     {"corrector_steps", res.corrector_steps}};
    if (!ok) rec["stalled_at"] = res.stalled_at;
    write_summary_file(dir, rec);
    write_record(std::cout, l.c.format, rec);
    announce(dir);
    return ok ? 0 : 1;
}

// winding

struct WindingArgs {
    Common c;
    std::string u_file, v_file;
    int voiculescu = 0;
};

int run_winding(const WindingArgs& w) {
    aga::UnitaryMatrix u = aga::UnitaryMatrix::identity(1), v = u;
    if (w.voiculescu > 0) {
        const auto rep = aga::voiculescu_family(w.voiculescu);
        u = rep.at("a");
        v = rep.at("c");
    } else {
        if (w.u_file.empty() || w.v_file.empty()) throw UsageError("winding: pass --u and --v, or --voiculescu N");
        u = read_unitary(w.u_file);
        v = read_unitary(w.v_file);
    }
    if (w.c.dry_run) {
        write_record(std::cout, w.c.format, ordered_json{{"subcommand", "winding"}, {"n", u.dim()}});
        return 0;
    }
    const aga::WindingReport r = aga::winding_number(u, v);
    write_record(std::cout, w.c.format,
                 ordered_json{{"value", r.value},
                              {"commutator_distance", r.commutator_distance},
                              {"raw_trace", r.raw_trace},
                              {"imaginary_residual", r.imaginary_residual},
                              {"reliable", r.reliable}});
    return r.reliable ? 0 : 1;
}

// obstruction

struct ObstructionArgs {
    Common c;
    std::string a_file, b_file;
    std::optional<long> n_small, m_pad;
    double eps_prime = 0.01;
    int voiculescu = 0;
};

int run_obstruction(const ObstructionArgs& o) {
    aga::UnitaryMatrix a = aga::UnitaryMatrix::identity(1), b = a;
    long n_small = 0, m_pad = 0;
    if (o.voiculescu > 0) {
        const auto rep = aga::voiculescu_family(o.voiculescu);
        a = rep.at("a");
        b = rep.at("b");
        n_small = o.n_small.value_or(o.voiculescu);
        m_pad = o.m_pad.value_or(0);
    } else {
        if (o.a_file.empty() || o.b_file.empty()) throw UsageError("obstruction: pass --a and --b, or --voiculescu N");
        if (!o.n_small || !o.m_pad) throw UsageError("obstruction: --n-small and --m-pad are required with --a/--b");
        a = read_unitary(o.a_file);
        b = read_unitary(o.b_file);
        n_small = *o.n_small;
        m_pad = *o.m_pad;
    }
    if (!(o.eps_prime > 0.0)) throw UsageError("obstruction: --eps-prime must be positive");
    if (o.c.dry_run) {
        write_record(std::cout, o.c.format,
                     ordered_json{{"subcommand", "obstruction"},
                                  {"n_small", n_small},
                                  {"m_pad", m_pad},
                                  {"eps_prime", o.eps_prime}});
        return 0;
    }
    const aga::ObstructionReport r = aga::trace_obstruction(a, b, n_small, m_pad, o.eps_prime);
    ordered_json rec{{"n_small", r.n_small},
                     {"m_pad", r.m_pad},
                     {"eps_prime", r.eps_prime},
                     {"N_count", r.N_count},
                     {"trace_abs", r.trace_abs},
                     {"lower_bound", r.lower_bound},
                     {"upper_bound", r.upper_bound},
                     {"contradiction", r.contradiction},
                     {"abab_deviation", r.abab_deviation},
                     {"max_diagonal_product", r.max_diagonal_product},
                     {"diagonal_estimate_applicable", r.diagonal_estimate_applicable},
                     {"diagonal_estimate_holds", r.diagonal_estimate_holds}};
    write_record(std::cout, o.c.format, rec);
    return 0;
}

// parse

struct ParseArgs {
    Common c;
    std::string file;
    std::string builtin;
};

int run_parse(const ParseArgs& p) {
    if (p.file.empty() == p.builtin.empty()) throw UsageError("parse: pass exactly one of FILE or --builtin");
    const aga::GroupPresentation pres =
        p.file.empty() ? aga::builtin_presentation(p.builtin) : aga::parse_presentation(read_text(p.file));
    if (p.c.format == "table" && !p.c.dry_run) {
        std::cout << aga::serialize(pres);
        return 0;
    }
    ordered_json rec{{"name", pres.name()},
                     {"generators", pres.generators().size()},
                     {"relators", pres.relators().size()}};
    if (p.c.format == "json" && !p.c.dry_run) {
        std::vector<std::string> rels;
        for (const auto& r : pres.relators()) rels.push_back(aga::to_string(r));
        rec["generators"] = pres.generators();
        rec["relators"] = rels;
    }
    write_record(std::cout, p.c.format, rec);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Almost representations, winding invariants and homotopy experiments"};
    app.require_subcommand(1);

    SweepArgs sweep;
    auto* s_sweep = app.add_subcommand("sweep-voiculescu", "Tabulate invariants of the Voiculescu family");
    add_common(s_sweep, sweep.c);
    s_sweep->add_option("--n-min", sweep.n_min, "Smallest n (>= 2)");
    s_sweep->add_option("--n-max", sweep.n_max, "Largest n (<= 512)");

    FlowArgs flow;
    auto* s_flow = app.add_subcommand("flow", "Run the defect-minimizing flow");
    add_common(s_flow, flow.c);
    s_flow->add_option("--rep", flow.rep_file, "Representation JSON file");
    s_flow->add_option("--builtin", flow.builtin, "Built-in input")
        ->check(CLI::IsMember({"voiculescu", "z2-perturbed"}));
    s_flow->add_option("--n", flow.n, "Matrix size for built-in inputs");
    s_flow->add_option("--magnitude", flow.magnitude, "Perturbation size for z2-perturbed");
    s_flow->add_option("--stride", flow.stride, "Record every stride-th step");
    s_flow->add_flag("--track-invariants,!--no-track-invariants", flow.track, "Log windings and halfplane counts");

    SurfaceArgs surf;
    auto* s_surf = app.add_subcommand("surface-reduce", "Deform a surface-group almost representation");
    add_common(s_surf, surf.c);
    s_surf->add_option("--rep", surf.rep_file, "Representation JSON file (default: generated near-genuine input)");
    s_surf->add_option("--genus", surf.genus, "Genus of the generated input");
    s_surf->add_option("--n", surf.n, "Matrix size of the generated input");
    s_surf->add_option("--epsilon", surf.epsilon, "Defect of the generated input");
    s_surf->add_option("--delta", surf.delta, "Lift tolerance");

    LiftArgs lift;
    auto* s_lift = app.add_subcommand("lift", "Lift a path of commutators to a path of pairs");
    add_common(s_lift, lift.c);
    s_lift->add_option("--u", lift.u_file, "Matrix JSON file");
    s_lift->add_option("--v", lift.v_file, "Matrix JSON file");
    s_lift->add_flag("--random-start", lift.random_start, "Draw an irreducible near-commuting start");
    s_lift->add_option("--n", lift.n, "Matrix size for --random-start");
    s_lift->add_option("--scale", lift.scale, "Non-commutativity of the random start");
    s_lift->add_option("--c-path", lift.c_path_file, "JSON-lines file of commutator targets");
    s_lift->add_option("--samples", lift.samples, "Samples of the geodesic to I when no --c-path is given");
    s_lift->add_option("--delta", lift.delta, "Residual tolerance");

    WindingArgs wind;
    auto* s_wind = app.add_subcommand("winding", "Winding number of an almost commuting pair");
    add_common(s_wind, wind.c);
    s_wind->add_option("--u", wind.u_file, "Matrix JSON file");
    s_wind->add_option("--v", wind.v_file, "Matrix JSON file");
    s_wind->add_option("--voiculescu", wind.voiculescu, "Use the Voiculescu pair of this size");

    ObstructionArgs obs;
    auto* s_obs = app.add_subcommand("obstruction", "Trace obstruction report");
    add_common(s_obs, obs.c);
    s_obs->add_option("--a", obs.a_file, "Matrix JSON file");
    s_obs->add_option("--b", obs.b_file, "Involution JSON file");
    s_obs->add_option("--n-small", obs.n_small, "Size of the original block");
    s_obs->add_option("--m-pad", obs.m_pad, "Size of the identity padding");
    s_obs->add_option("--eps-prime", obs.eps_prime, "Window parameter");
    s_obs->add_option("--voiculescu", obs.voiculescu, "Use sigma_n(a), sigma_n(b) of this size");

    ParseArgs parse;
    auto* s_parse = app.add_subcommand("parse", "Validate a presentation file");
    add_common(s_parse, parse.c);
    s_parse->add_option("file", parse.file, "Presentation text file");
    s_parse->add_option("--builtin", parse.builtin, "Built-in presentation, e.g. surface:2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*s_sweep) return run_sweep(sweep);
        if (*s_flow) return run_flow(flow);
        if (*s_surf) return run_surface(surf);
        if (*s_lift) return run_lift(lift);
        if (*s_wind) return run_winding(wind);
        if (*s_obs) return run_obstruction(obs);
        if (*s_parse) return run_parse(parse);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
