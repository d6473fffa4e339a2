#include "qre/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "qre/errors.hpp"

namespace qre {

namespace {

std::string shortest(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

Json finite_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

} // namespace

Json strategy_to_json(const Strategy& s) {
    Json knots = Json::array();
    for (const Knot& k : s.knots()) knots.push_back(Json::array({k.t, k.p}));
    return Json{{"knots", std::move(knots)}};
}

Strategy strategy_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("knots") || !j["knots"].is_array())
        throw ParseError("strategy JSON must be an object with a 'knots' array");
    std::vector<Knot> ks;
    for (const auto& e : j["knots"]) {
        if (!e.is_array() || e.size() != 2)
            throw ParseError("each knot must be a [t, p] pair");
        ks.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return Strategy(std::move(ks));
}

std::string strategy_to_csv(const Strategy& s) {
    std::string out = "t,p\n";
    for (const Knot& k : s.knots()) {
        out += shortest(k.t);
        out += ',';
        out += shortest(k.p);
        out += '\n';
    }
    return out;
}

Strategy strategy_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("strategy CSV: empty input");
    std::vector<Knot> ks;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("strategy CSV: missing comma", line_no);
        try {
            ks.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ParseError("strategy CSV: cannot parse row", line_no);
        }
    }
    return Strategy(std::move(ks));
}

Json game_to_json(const GameSpec& g) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>)
                return Json{{"game", "vd"}, {"params", {{"B", v.B}}}};
            else if constexpr (std::is_same_v<T, GlobalGame>)
                return Json{{"game", "gg"},
                            {"params", {{"k", v.k}, {"c", v.c}, {"eps", v.eps}}}};
            else
                return Json{{"game", "cg"}, {"params", {{"M", v.M}}}};
        },
        g);
}

GameSpec game_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("game"))
        throw ParseError("game JSON must carry a 'game' tag");
    std::string tag = j["game"].get<std::string>();
    const Json params = j.value("params", Json::object());
    auto need = [&](const char* key) -> double {
        if (!params.contains(key))
            throw ParseError(std::string("game JSON missing parameter '") + key + "'");
        return params[key].get<double>();
    };
    GameSpec g = [&]() -> GameSpec {
        if (tag == "vd") return VolunteersDilemma{need("B")};
        if (tag == "gg") return GlobalGame{need("k"), need("c"), need("eps")};
        if (tag == "cg") return CompromiseGame{need("M")};
        throw ParseError("unknown game tag '" + tag + "' (expected vd, gg, or cg)");
    }();
    validate(g);
    return g;
}

Json type_set_to_json(const TypeSet& s) {
    return Json{{"kind", s.kind == TypeSet::Kind::open_interval ? "open-interval" : "singleton"},
                {"lower", s.lower},
                {"upper", s.upper},
                {"measure", s.measure}};
}

Json ne_to_json(const NeDescription& ne) {
    switch (ne.kind) {
        case NeDescription::Kind::threshold_below:
            return Json{{"kind", "threshold"},
                        {"threshold", ne.threshold},
                        {"action1_region", "below"}};
        case NeDescription::Kind::threshold_above:
            return Json{{"kind", "threshold"},
                        {"threshold", ne.threshold},
                        {"action1_region", "above"}};
        case NeDescription::Kind::constant_zero:
            return Json{{"kind", "constant"}, {"value", 0.0}};
    }
    throw DomainError("unknown NE kind");
}

Json report_to_json(const VerificationReport& rep) {
    Json j{{"shape_ok", rep.shape_ok},
           {"interior_ok", rep.interior_ok},
           {"crossing", rep.crossing ? Json(*rep.crossing) : Json(nullptr)},
           {"indifference_residual",
            rep.indifference_residual ? Json(*rep.indifference_residual) : Json(nullptr)},
           {"symmetry_max_violation",
            rep.symmetry_max_violation ? Json(*rep.symmetry_max_violation) : Json(nullptr)},
           {"tolerance", rep.tolerance}};
    switch (rep.verdict) {
        case Verdict::qre_consistent: j["verdict"] = "QRE-consistent"; break;
        case Verdict::sqre_consistent: j["verdict"] = "SQRE-consistent"; break;
        case Verdict::rejected: j["verdict"] = "rejected"; break;
    }
    j["reasons"] = rep.reasons;
    return j;
}

Json curve_to_json(const QuantalResponseCurve& c) {
    Json pts = Json::array();
    for (const auto& p : c.points) pts.push_back(Json::array({p.d, p.q}));
    return Json{{"points", std::move(pts)},
                {"tail_rule", c.tail_rule},
                {"tail_lo", {{"a", c.tail_lo_a}, {"b", c.tail_lo_b}}},
                {"tail_hi", {{"a", c.tail_hi_a}, {"b", c.tail_hi_b}}}};
}

std::string curve_to_csv(const QuantalResponseCurve& c) {
    std::string out = "d,q\n";
    for (const auto& p : c.points) {
        out += shortest(p.d);
        out += ',';
        out += shortest(p.q);
        out += '\n';
    }
    return out;
}

Json trace_to_json(const SymmetricConstructionTrace& tr) {
    Json vertices = Json::array();
    for (std::size_t i = 0; i < tr.x.size(); ++i)
        vertices.push_back(Json::array({tr.x[i], tr.y[i]}));
    return Json{{"T", tr.T()},      {"h", tr.h},   {"delta", tr.delta},
                {"s", tr.s},        {"D", tr.D},   {"L", tr.L},
                {"eps", tr.eps},    {"vertices", std::move(vertices)}};
}

Json test_result_to_json(const TestResult& r) {
    return Json{{"s_tilde_hat", r.s_tilde_hat},
                {"beta_hat", r.beta_hat},
                {"ci_95", Json::array({r.ci95_lo, r.ci95_hi})},
                {"ci_99", Json::array({r.ci99_lo, r.ci99_hi})},
                {"reject_95", r.reject_95},
                {"reject_99", r.reject_99},
                {"replicates", r.replicates},
                {"failed_replicates", r.failed_replicates},
                {"seed", r.seed},
                {"bandwidth", r.bandwidth},
                {"grid", r.grid},
                {"resample_unit", r.cluster_by_subject ? "subjects" : "rows"},
                {"s_tilde_mode", r.s_tilde_fixed ? "fixed" : "per-replicate"}};
}

Json kernel_to_json(const KernelEstimate& est) {
    Json pts = Json::array();
    for (std::size_t i = 0; i < est.s.size(); ++i)
        pts.push_back(Json{{"s", est.s[i]},
                           {"sigma_hat", finite_or_null(est.sigma_hat[i])},
                           {"count", est.counts[i]}});
    return Json{{"bandwidth", est.h}, {"points", std::move(pts)}};
}

std::string kernel_to_csv(const KernelEstimate& est) {
    std::string out = "s,sigma_hat,count\n";
    for (std::size_t i = 0; i < est.s.size(); ++i) {
        out += shortest(est.s[i]);
        out += ',';
        out += est.defined(i) ? shortest(est.sigma_hat[i]) : std::string("");
        out += ',';
        out += std::to_string(est.counts[i]);
        out += '\n';
    }
    return out;
}

Json monotonicity_to_json(const MonotonicityReport& rep) {
    return Json{{"violations", rep.violations},
                {"max_increase", rep.max_increase},
                {"isotonic_max_distance", rep.isotonic_max_distance},
                {"isotonic_rms_distance", rep.isotonic_rms_distance}};
}

Json symmetry_checks_to_json(const CompromiseSymmetryReport& rep) {
    return Json{{"strict_pairing_ok", rep.strict_pairing_ok},
                {"worst_margin", rep.worst_margin},
                {"witness_eps", rep.witness_eps},
                {"tail_condition_applicable", rep.tail_condition_applicable},
                {"tail_condition_ok", rep.tail_condition_ok},
                {"tail_threshold", rep.tail_threshold}};
}

} // namespace qre
