#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "palab/errors.hpp"

namespace palab {

using Degree = std::uint32_t;
using NodeId = std::uint32_t;

/// f(k) = k + delta.
struct Affine {
    double delta = 0.0;

    friend bool operator==(const Affine&, const Affine&) = default;
};

/// f(k) = (k + shift)^beta.
struct Power {
    double beta = 1.0;
    double shift = 0.0;

    friend bool operator==(const Power&, const Power&) = default;
};

/// Beyond the stored range f stays at the last stored value.
struct ConstantLast {
    friend bool operator==(const ConstantLast&, const ConstantLast&) = default;
};

/// Beyond the stored range f(k) = k + delta.
struct AffineExtension {
    double delta = 0.0;

    friend bool operator==(const AffineExtension&, const AffineExtension&) = default;
};

using TailRule = std::variant<ConstantLast, AffineExtension>;

/// f(k) = values[k-1] for k <= values.size(), then the tail rule.
struct Table {
    std::vector<double> values;
    TailRule tail = ConstantLast{};

    friend bool operator==(const Table&, const Table&) = default;
};

using Kind = std::variant<Affine, Power, Table>;

/// Claims f(k) <= scale * (k + delta).
struct AffineCert {
    double delta = 0.0;
    double scale = 1.0;

    friend bool operator==(const AffineCert&, const AffineCert&) = default;
};

/// Claims f(k) <= c * (k + delta)^beta with beta < 1.
struct PowerBoundedCert {
    double beta = 0.5;
    double delta = 0.0;
    double c = 1.0;

    friend bool operator==(const PowerBoundedCert&, const PowerBoundedCert&) = default;
};

/// Claims f(k) <= bound.
struct BoundedCert {
    double bound = 1.0;

    friend bool operator==(const BoundedCert&, const BoundedCert&) = default;
};

using Certificate = std::variant<AffineCert, PowerBoundedCert, BoundedCert>;

inline double certified_bound(const Certificate& cert, Degree k) {
    const double x = static_cast<double>(k);
    return std::visit(
        [x](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, AffineCert>) {
                return c.scale * (x + c.delta);
            } else if constexpr (std::is_same_v<T, PowerBoundedCert>) {
                return c.c * std::pow(x + c.delta, c.beta);
            } else {
                return c.bound;
            }
        },
        cert);
}

/// An attachment function f: {1,2,...} -> (0, inf), scaled by a positive
/// multiplier, together with an upper-bound certificate used to truncate
/// series over all degrees. Immutable after construction.
class PAFunction {
public:
    /// Without an explicit certificate a tight one is derived from the kind.
    explicit PAFunction(Kind kind, double scale = 1.0,
                        std::optional<Certificate> certificate = std::nullopt)
        : kind_(std::move(kind)), scale_(scale) {
        check_parameters();
        certificate_ = certificate ? *certificate : derive_certificate();
        check_certificate_parameters();
    }

    static PAFunction affine(double delta, double scale = 1.0) {
        return PAFunction(Affine{delta}, scale);
    }
    static PAFunction power(double beta, double shift = 0.0, double scale = 1.0) {
        return PAFunction(Power{beta, shift}, scale);
    }
    static PAFunction table(std::vector<double> values, TailRule tail = ConstantLast{},
                            double scale = 1.0) {
        return PAFunction(Table{std::move(values), tail}, scale);
    }
    /// f == c.
    static PAFunction constant(double c) { return table({1.0}, ConstantLast{}, c); }

    /// Throws std::domain_error for k = 0.
    double operator()(Degree k) const {
        if (k == 0) throw std::domain_error("attachment function evaluated at degree 0");
        return scale_ * base(k);
    }

    const Kind& kind() const noexcept { return kind_; }
    double scale() const noexcept { return scale_; }
    const Certificate& certificate() const noexcept { return certificate_; }

    /// c * f, with the certificate scaled alongside.
    PAFunction scaled(double c) const {
        if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("scale multiplier must be positive");
        Certificate cert = std::visit(
            [c](auto v) -> Certificate {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, AffineCert>) {
                    v.scale *= c;
                } else if constexpr (std::is_same_v<T, PowerBoundedCert>) {
                    v.c *= c;
                } else {
                    v.bound *= c;
                }
                return v;
            },
            certificate_);
        return PAFunction(kind_, scale_ * c, cert);
    }

    /// Smallest L such that f(k) equals the certified bound for every k > L,
    /// if f has such an exactly-certified tail. Series remainders past L are
    /// then available in closed form instead of as bounds.
    std::optional<Degree> exact_tail_start() const {
        if (const auto* a = std::get_if<Affine>(&kind_)) {
            if (const auto* c = std::get_if<AffineCert>(&certificate_);
                c && c->delta == a->delta && c->scale == scale_)
                return 0;
        } else if (const auto* p = std::get_if<Power>(&kind_)) {
            if (const auto* c = std::get_if<AffineCert>(&certificate_);
                c && p->beta == 1.0 && c->delta == p->shift && c->scale == scale_)
                return 0;
        } else if (const auto* t = std::get_if<Table>(&kind_)) {
            const auto m = static_cast<Degree>(t->values.size());
            if (std::holds_alternative<ConstantLast>(t->tail)) {
                if (const auto* c = std::get_if<BoundedCert>(&certificate_);
                    c && c->bound == scale_ * t->values.back())
                    return m;
            } else {
                const auto& ext = std::get<AffineExtension>(t->tail);
                if (const auto* c = std::get_if<AffineCert>(&certificate_);
                    c && c->delta == ext.delta && c->scale == scale_)
                    return m;
            }
        }
        return std::nullopt;
    }

    friend bool operator==(const PAFunction&, const PAFunction&) = default;

private:
    double base(Degree k) const {
        const double x = static_cast<double>(k);
        return std::visit(
            [k, x](const auto& v) -> double {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Affine>) {
                    return x + v.delta;
                } else if constexpr (std::is_same_v<T, Power>) {
                    return v.beta == 1.0 ? x + v.shift : std::pow(x + v.shift, v.beta);
                } else {
                    if (k <= v.values.size()) return v.values[k - 1];
                    if (const auto* ext = std::get_if<AffineExtension>(&v.tail))
                        return x + ext->delta;
                    return v.values.back();
                }
            },
            kind_);
    }

    void check_parameters() const {
        if (!(scale_ > 0.0) || !std::isfinite(scale_))
            throw ConfigError("scale must be a positive finite number");
        std::visit(
            [](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Affine>) {
                    if (!(v.delta >= 0.0) || !std::isfinite(v.delta))
                        throw ConfigError("affine delta must be >= 0");
                } else if constexpr (std::is_same_v<T, Power>) {
                    if (!(v.beta > 0.0 && v.beta <= 1.0))
                        throw ConfigError("power beta must lie in (0, 1]");
                    if (!(v.shift >= 0.0) || !std::isfinite(v.shift))
                        throw ConfigError("power shift must be >= 0");
                } else {
                    if (v.values.empty()) throw ConfigError("table needs at least one value");
                    for (double x : v.values)
                        if (!(x > 0.0) || !std::isfinite(x))
                            throw ConfigError("table values must be positive and finite");
                    if (const auto* ext = std::get_if<AffineExtension>(&v.tail))
                        if (!(ext->delta >= 0.0) || !std::isfinite(ext->delta))
                            throw ConfigError("affine extension delta must be >= 0");
                }
            },
            kind_);
    }

    void check_certificate_parameters() const {
        std::visit(
            [](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, AffineCert>) {
                    if (!(c.delta >= 0.0) || !(c.scale > 0.0))
                        throw ConfigError("affine certificate needs delta >= 0 and scale > 0");
                } else if constexpr (std::is_same_v<T, PowerBoundedCert>) {
                    if (!(c.beta > 0.0 && c.beta < 1.0) || !(c.delta >= 0.0) || !(c.c > 0.0))
                        throw ConfigError(
                            "power certificate needs beta in (0,1), delta >= 0 and c > 0");
                } else {
                    if (!(c.bound > 0.0)) throw ConfigError("bounded certificate needs M > 0");
                }
            },
            certificate_);
    }

    Certificate derive_certificate() const {
        return std::visit(
            [this](const auto& v) -> Certificate {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Affine>) {
                    return AffineCert{v.delta, scale_};
                } else if constexpr (std::is_same_v<T, Power>) {
                    if (v.beta == 1.0) return AffineCert{v.shift, scale_};
                    return PowerBoundedCert{v.beta, v.shift, scale_};
                } else {
                    if (std::holds_alternative<ConstantLast>(v.tail)) {
                        return BoundedCert{scale_ * *std::max_element(v.values.begin(),
                                                                      v.values.end())};
                    }
                    // Smallest delta with values[i] <= (i+1) + delta over the table.
                    double delta = std::get<AffineExtension>(v.tail).delta;
                    for (std::size_t i = 0; i < v.values.size(); ++i)
                        delta = std::max(delta, v.values[i] - static_cast<double>(i + 1));
                    return AffineCert{delta, scale_};
                }
            },
            kind_);
    }

    Kind kind_;
    double scale_ = 1.0;
    Certificate certificate_;
};

/// The three functions of the reference simulation study, each with f(1) = 1.
inline PAFunction reference_f1() { return PAFunction::affine(0.5, 1.0 / 1.5); }
inline PAFunction reference_f2() { return PAFunction::power(2.0 / 3.0); }
inline PAFunction reference_f3() { return PAFunction::power(0.25, 2.0, std::pow(3.0, -0.25)); }

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind { Positivity, Monotonicity, Certificate };

struct Violation {
    ViolationKind kind;
    Degree k;
    double value;
    double reference;  // previous value (monotonicity) or certified bound
};

struct ValidationReport {
    Degree horizon = 0;
    std::optional<Violation> first_violation;

    bool ok() const noexcept { return !first_violation.has_value(); }
};

/// Scans k = 1..horizon for positivity, monotonicity and certificate
/// domination; reports the first violation found.
inline ValidationReport validate_function(const PAFunction& f, Degree horizon) {
    if (horizon == 0) throw ConfigError("validation horizon must be >= 1");
    ValidationReport report{horizon, std::nullopt};
    double previous = 0.0;
    for (Degree k = 1; k <= horizon; ++k) {
        const double v = f(k);
        if (!(v > 0.0) || !std::isfinite(v)) {
            report.first_violation = Violation{ViolationKind::Positivity, k, v, 0.0};
            break;
        }
        if (k > 1 && v < previous) {
            report.first_violation = Violation{ViolationKind::Monotonicity, k, v, previous};
            break;
        }
        const double bound = certified_bound(f.certificate(), k);
        if (v > bound * (1.0 + 1e-12)) {
            report.first_violation = Violation{ViolationKind::Certificate, k, v, bound};
            break;
        }
        previous = v;
    }
    return report;
}

inline std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::Positivity: return "positivity";
        case ViolationKind::Monotonicity: return "monotonicity";
        case ViolationKind::Certificate: return "certificate";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json certificate_to_json(const Certificate& cert) {
    return std::visit(
        [](const auto& c) -> nlohmann::json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, AffineCert>) {
                return {{"type", "affine"}, {"delta", c.delta}, {"scale", c.scale}};
            } else if constexpr (std::is_same_v<T, PowerBoundedCert>) {
                return {{"type", "power_bounded"}, {"beta", c.beta}, {"delta", c.delta},
                        {"c", c.c}};
            } else {
                return {{"type", "bounded"}, {"M", c.bound}};
            }
        },
        cert);
}

inline Certificate certificate_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "affine") return AffineCert{j.at("delta").get<double>(), j.value("scale", 1.0)};
    if (type == "power_bounded")
        return PowerBoundedCert{j.at("beta").get<double>(), j.value("delta", 0.0),
                                j.value("c", 1.0)};
    if (type == "bounded") return BoundedCert{j.at("M").get<double>()};
    throw FormatError("unknown certificate type '" + type + "'");
}

inline nlohmann::json to_json(const PAFunction& f) {
    nlohmann::json j = std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Affine>) {
                return {{"kind", "affine"}, {"delta", v.delta}};
            } else if constexpr (std::is_same_v<T, Power>) {
                return {{"kind", "power"}, {"beta", v.beta}, {"delta", v.shift}};
            } else {
                nlohmann::json out{{"kind", "table"}, {"values", v.values}};
                if (const auto* ext = std::get_if<AffineExtension>(&v.tail))
                    out["tail_rule"] = {{"type", "affine_extension"}, {"delta", ext->delta}};
                else
                    out["tail_rule"] = "constant_last";
                return out;
            }
        },
        f.kind());
    j["scale"] = f.scale();
    j["certificate"] = certificate_to_json(f.certificate());
    return j;
}

/// Parses {"kind": "affine"|"power"|"table", ...}. The certificate is
/// optional; a tight one is derived when absent.
inline PAFunction pa_function_from_json(const nlohmann::json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        const double scale = j.value("scale", 1.0);
        std::optional<Certificate> cert;
        if (j.contains("certificate")) cert = certificate_from_json(j.at("certificate"));
        if (kind == "affine") return PAFunction(Affine{j.value("delta", 0.0)}, scale, cert);
        if (kind == "power")
            return PAFunction(Power{j.at("beta").get<double>(), j.value("delta", 0.0)}, scale,
                              cert);
        if (kind == "table") {
            TailRule tail = ConstantLast{};
            if (j.contains("tail_rule")) {
                const auto& t = j.at("tail_rule");
                const std::string type = t.is_string() ? t.get<std::string>()
                                                       : t.at("type").get<std::string>();
                if (type == "affine_extension")
                    tail = AffineExtension{t.is_object() ? t.value("delta", 0.0) : 0.0};
                else if (type != "constant_last")
                    throw FormatError("unknown tail rule '" + type + "'");
            }
            return PAFunction(Table{j.at("values").get<std::vector<double>>(), tail}, scale,
                              cert);
        }
        throw FormatError("unknown function kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad attachment function JSON: ") + e.what());
    }
}

/// Accepts the preset names f1, f2, f3, linear and constant, or inline JSON.
inline PAFunction parse_pa_function(const std::string& text) {
    if (text == "f1") return reference_f1();
    if (text == "f2") return reference_f2();
    if (text == "f3") return reference_f3();
    if (text == "linear") return PAFunction::affine(0.0);
    if (text == "constant") return PAFunction::constant(1.0);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad attachment function JSON: ") + e.what());
    }
    return pa_function_from_json(j);
}

}  // namespace palab
