#pragma once

// JSON / CSV encodings of matrices, almost representations, reports and traces.

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aga/almostrep.hpp"
#include "aga/homotopy.hpp"
#include "aga/invariants.hpp"

namespace aga::io {

using nlohmann::json;

/// %.17g: enough digits to round-trip a double.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Compact JSON text in which every floating-point number carries 17 significant digits.
/// Non-finite numbers are written as null.
template <class Json>
void dump17(std::ostream& out, const Json& j) {
    switch (j.type()) {
        case Json::value_t::number_float: {
            const double x = j.template get<double>();
            if (std::isfinite(x))
                out << format_double(x);
            else
                out << "null";
            break;
        }
        case Json::value_t::object: {
            out << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ',';
                first = false;
                out << Json(it.key()).dump() << ':';
                dump17(out, it.value());
            }
            out << '}';
            break;
        }
        case Json::value_t::array: {
            out << '[';
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) out << ',';
                dump17(out, j[k]);
            }
            out << ']';
            break;
        }
        default:
            out << j.dump();
    }
}

template <class Json>
std::string dump17(const Json& j) {
    std::ostringstream os;
    dump17(os, j);
    return os.str();
}

inline json matrix_to_json(const Matrix& m) {
    json entries = json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
    return {{"n", m.rows()}, {"entries", std::move(entries)}};
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
        throw PreconditionError("matrix JSON: expected object with \"n\" and \"entries\"");
    const auto n = j.at("n").get<long>();
    if (n < 0) throw PreconditionError("matrix JSON: negative n");
    const auto& e = j.at("entries");
    if (!e.is_array() || static_cast<long>(e.size()) != n * n)
        throw PreconditionError("matrix JSON: expected n^2 = " + std::to_string(n * n) + " entries");
    Matrix m(n, n);
    for (long k = 0; k < n * n; ++k) {
        const auto& z = e[static_cast<std::size_t>(k)];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
            throw PreconditionError("matrix JSON: entry " + std::to_string(k) + " is not [re, im]");
        m(k / n, k % n) = Complex(z[0].get<double>(), z[1].get<double>());
    }
    require_finite(m, "matrix JSON");
    return m;
}

inline UnitaryMatrix unitary_from_json(const json& j, double tol = kUnitarityTol) {
    return UnitaryMatrix(matrix_from_json(j), tol);
}

inline json rep_to_json(const AlmostRep& rep) {
    json assignment = json::object();
    const auto& gens = rep.presentation().generators();
    for (std::size_t i = 0; i < gens.size(); ++i) assignment[gens[i]] = matrix_to_json(rep.at(i).matrix());
    return {{"presentation", serialize(rep.presentation())}, {"n", rep.dimension()}, {"assignment", assignment}};
}

inline AlmostRep rep_from_json(const json& j) {
    if (!j.is_object() || !j.contains("presentation") || !j.contains("assignment"))
        throw PreconditionError("AlmostRep JSON: expected \"presentation\" and \"assignment\"");
    const auto p = parse_presentation(j.at("presentation").get<std::string>());
    const auto& a = j.at("assignment");
    std::vector<UnitaryMatrix> mats;
    for (const auto& g : p.generators()) {
        if (!a.contains(g)) throw PreconditionError("AlmostRep JSON: no matrix for generator '" + g + "'");
        mats.push_back(unitary_from_json(a.at(g)));
    }
    AlmostRep rep(p, std::move(mats));
    if (j.contains("n") && j.at("n").get<long>() != rep.dimension())
        throw PreconditionError("AlmostRep JSON: \"n\" does not match the matrix size");
    return rep;
}

inline json to_json(const WindingReport& w) {
    return {{"value", w.value},
            {"commutator_distance", w.commutator_distance},
            {"raw_trace", w.raw_trace},
            {"imaginary_residual", w.imaginary_residual},
            {"reliable", w.reliable}};
}

inline json to_json(const ObstructionReport& r) {
    return {{"n_small", r.n_small},
            {"m_pad", r.m_pad},
            {"eps_prime", r.eps_prime},
            {"trace_abs", r.trace_abs},
            {"lower_bound", r.lower_bound},
            {"N_count", r.N_count},
            {"upper_bound", r.upper_bound},
            {"contradiction", r.contradiction},
            {"abab_deviation", r.abab_deviation},
            {"max_diagonal_product", r.max_diagonal_product},
            {"diagonal_estimate_applicable", r.diagonal_estimate_applicable},
            {"diagonal_estimate_holds", r.diagonal_estimate_holds}};
}

/// Reads one matrix JSON object per non-blank line.
inline std::vector<UnitaryMatrix> read_matrix_lines(std::istream& in) {
    std::vector<UnitaryMatrix> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(unitary_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw PreconditionError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const PreconditionError& e) {
            throw PreconditionError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline void write_matrix_lines(std::ostream& out, const std::vector<UnitaryMatrix>& path) {
    for (const auto& u : path) out << dump17(matrix_to_json(u.matrix())) << '\n';
}

/// CSV with columns t, defect, objective and, when the trace logged invariants,
/// winding_<x>_<y> and halfplane_<g> columns ("undefined" where the winding is undefined).
inline void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
    const bool inv = !trace.invariant_log.empty();
    out << "t,defect,objective";
    if (inv) {
        for (const auto& [x, y] : trace.winding_pairs) out << ",winding_" << x << '_' << y;
        for (const auto& g : trace.involutions) out << ",halfplane_" << g;
    }
    out << '\n';
    for (std::size_t k = 0; k < trace.samples.size(); ++k) {
        const auto& s = trace.samples[k];
        out << format_double(s.t) << ',' << format_double(s.defect) << ',' << format_double(s.objective);
        if (inv) {
            const auto& il = trace.invariant_log[k];
            for (const auto& w : il.windings) out << ',' << (w ? std::to_string(*w) : std::string("undefined"));
            for (const auto& h : il.halfplanes) out << ',' << h.count;
        }
        out << '\n';
    }
}

/// One JSON object per sample: t, defect, objective and the full representation.
inline void write_trace_jsonl(std::ostream& out, const FlowTrace& trace) {
    for (const auto& s : trace.samples) {
        json j = {{"t", s.t}, {"defect", s.defect}, {"objective", s.objective}, {"rep", rep_to_json(s.rep)}};
        out << dump17(j) << '\n';
    }
}

inline FlowTrace read_trace_jsonl(std::istream& in) {
    FlowTrace trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = json::parse(line);
        trace.samples.push_back({j.at("t").get<double>(), rep_from_json(j.at("rep")), j.at("defect").get<double>(),
                                 j.at("objective").get<double>()});
    }
    return trace;
}

inline void write_lift_csv(std::ostream& out, const ContinuationResult& r) {
    out << "t,residual\n";
    for (const auto& s : r.lifted_path) out << format_double(s.t) << ',' << format_double(s.residual) << '\n';
}

inline void write_lift_jsonl(std::ostream& out, const ContinuationResult& r) {
    for (const auto& s : r.lifted_path) {
        json j = {{"t", s.t},
                  {"residual", s.residual},
                  {"u", matrix_to_json(s.u.matrix())},
                  {"v", matrix_to_json(s.v.matrix())}};
        out << dump17(j) << '\n';
    }
}

}  // namespace aga::io
