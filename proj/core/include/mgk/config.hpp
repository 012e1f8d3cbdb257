#pragma once

// JSON glue for the experiment configs: distribution literals like
//   {"kind":"uniform","a":0,"b":2}
//   {"kind":"hyperexp2","mean":1,"scv":10}
// and policy names. Round-trip stable: dist_to_json(dist_from_json(j)) is
// the normalized form of j.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mgk/analytic.hpp"
#include "mgk/dist.hpp"

namespace mgk {

inline ServiceDist dist_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    bool heavy = j.value("allow_heavy_tail", false);
    if (kind == "uniform")
        return ServiceDist(Uniform{j.at("a").get<double>(), j.at("b").get<double>()});
    if (kind == "exponential") {
        if (j.contains("rate")) return ServiceDist(Exponential{j.at("rate").get<double>()});
        return ServiceDist(Exponential{1.0 / j.at("mean").get<double>()});
    }
    if (kind == "hyperexp2") {
        if (j.contains("scv"))
            return hyperexp_from_mean_scv(j.at("mean").get<double>(),
                                          j.at("scv").get<double>());
        return ServiceDist(Hyperexp2{j.at("p1").get<double>(), j.at("rate1").get<double>(),
                                     j.at("rate2").get<double>()});
    }
    if (kind == "pareto")
        return ServiceDist(Pareto{j.at("xm").get<double>(), j.at("alpha").get<double>()},
                           heavy);
    if (kind == "bounded_pareto")
        return ServiceDist(BoundedPareto{j.at("lower").get<double>(),
                                         j.at("upper").get<double>(),
                                         j.at("alpha").get<double>()},
                           heavy);
    if (kind == "deterministic")
        return ServiceDist(Deterministic{j.at("c").get<double>()});
    throw std::invalid_argument("unknown distribution kind: " + kind);
}

inline nlohmann::json dist_to_json(const ServiceDist& d) {
    nlohmann::json j;
    j["kind"] = d.kind();
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                j["a"] = v.a;
                j["b"] = v.b;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                j["rate"] = v.rate;
            } else if constexpr (std::is_same_v<T, Hyperexp2>) {
                j["p1"] = v.p1;
                j["rate1"] = v.rate1;
                j["rate2"] = v.rate2;
            } else if constexpr (std::is_same_v<T, Pareto>) {
                j["xm"] = v.xm;
                j["alpha"] = v.alpha;
            } else if constexpr (std::is_same_v<T, BoundedPareto>) {
                j["lower"] = v.lower;
                j["upper"] = v.upper;
                j["alpha"] = v.alpha;
            } else {
                j["c"] = v.c;
            }
        },
        d.variant());
    return j;
}

inline Policy policy_from_string(const std::string& s) {
    if (s == "SRPT" || s == "srpt") return Policy::SRPT;
    if (s == "PSJF" || s == "psjf") return Policy::PSJF;
    if (s == "RS" || s == "rs") return Policy::RS;
    if (s == "FB" || s == "fb" || s == "LAS" || s == "las") return Policy::FB;
    if (s == "FCFS" || s == "fcfs") return Policy::FCFS;
    throw std::invalid_argument("unknown policy: " + s);
}

}  // namespace mgk
