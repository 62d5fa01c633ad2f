#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "palab/pa_function.hpp"

using namespace palab;

TEST(PAFunction, AffineIdentityCase) { EXPECT_DOUBLE_EQ(PAFunction::affine(0.0)(3), 3.0); }

TEST(PAFunction, PowerTwoThirdsAtEight) { EXPECT_NEAR(PAFunction::power(2.0 / 3.0)(8), 4.0, 1e-14); }

TEST(PAFunction, TableConstantTail) {
    const auto f = PAFunction::table({1, 2, 2}, ConstantLast{});
    EXPECT_EQ(f(10), 2.0);
    EXPECT_EQ(f(2), 2.0);
    EXPECT_EQ(f(1), 1.0);
}

TEST(PAFunction, TableAffineTail) {
    const auto f = PAFunction::table({1, 2}, AffineExtension{0.5});
    EXPECT_EQ(f(3), 3.5);
    EXPECT_EQ(f(10), 10.5);
}

TEST(PAFunction, DegreeZeroIsADomainError) {
    EXPECT_THROW(PAFunction::affine(0.0)(0), std::domain_error);
}

TEST(PAFunction, ReferenceFunctionsStartAtOne) {
    EXPECT_NEAR(reference_f1()(1), 1.0, 1e-15);
    EXPECT_NEAR(reference_f2()(1), 1.0, 1e-15);
    EXPECT_NEAR(reference_f3()(1), 1.0, 1e-15);
    EXPECT_NEAR(reference_f3()(2), std::pow(4.0 / 3.0, 0.25), 1e-15);
}

TEST(PAFunction, RejectsBadParameters) {
    EXPECT_THROW(PAFunction::affine(-0.1), ConfigError);
    EXPECT_THROW(PAFunction::power(0.0), ConfigError);
    EXPECT_THROW(PAFunction::power(1.5), ConfigError);
    EXPECT_THROW(PAFunction::table({}), ConfigError);
    EXPECT_THROW(PAFunction::table({1.0, -1.0}), ConfigError);
    EXPECT_THROW(PAFunction::affine(0.0, 0.0), ConfigError);
    EXPECT_THROW(PAFunction(Power{0.5, 0.0}, 1.0, PowerBoundedCert{1.0, 0.0, 1.0}), ConfigError);
}

TEST(PAFunction, ScaledMultipliesValuesAndCertificate) {
    const auto f = reference_f2();
    const auto g = f.scaled(3.0);
    for (Degree k = 1; k < 50; ++k) EXPECT_DOUBLE_EQ(g(k), 3.0 * f(k));
    EXPECT_DOUBLE_EQ(certified_bound(g.certificate(), 7), 3.0 * certified_bound(f.certificate(), 7));
}

TEST(PAFunction, ExactTailDetection) {
    EXPECT_EQ(PAFunction::affine(0.5, 2.0).exact_tail_start(), Degree{0});
    EXPECT_EQ(PAFunction::power(1.0, 1.0).exact_tail_start(), Degree{0});
    EXPECT_EQ(PAFunction::constant(2.0).exact_tail_start(), Degree{1});
    EXPECT_EQ(PAFunction::table({1, 2, 3}, AffineExtension{0.0}).exact_tail_start(), Degree{3});
    EXPECT_FALSE(reference_f2().exact_tail_start().has_value());
    // A looser certificate than the function itself is only a bound.
    EXPECT_FALSE(PAFunction(Affine{0.0}, 1.0, AffineCert{1.0, 1.0}).exact_tail_start());
}

TEST(Validation, AffineIsOk) { EXPECT_TRUE(validate_function(PAFunction::affine(0.5), 100).ok()); }

TEST(Validation, DecreasingTableFailsMonotonicityAtTwo) {
    const auto rep = validate_function(PAFunction::table({2, 1}), 10);
    ASSERT_FALSE(rep.ok());
    EXPECT_EQ(rep.first_violation->kind, ViolationKind::Monotonicity);
    EXPECT_EQ(rep.first_violation->k, 2u);
}

TEST(Validation, PowerWithUnitBoundFailsCertificateAtTwo) {
    const PAFunction f(Power{2.0 / 3.0, 0.0}, 1.0, BoundedCert{1.0});
    const auto rep = validate_function(f, 10);
    ASSERT_FALSE(rep.ok());
    EXPECT_EQ(rep.first_violation->kind, ViolationKind::Certificate);
    EXPECT_EQ(rep.first_violation->k, 2u);
}

TEST(Validation, DerivedCertificatesDominate) {
    for (const auto& f : {reference_f1(), reference_f2(), reference_f3(), PAFunction::constant(3.0),
                          PAFunction::table({1, 3, 3.5}, AffineExtension{0.0}),
                          PAFunction::table({0.5, 0.7, 2.0})})
        EXPECT_TRUE(validate_function(f, 2000).ok()) << to_json(f).dump();
}

TEST(Validation, ZeroHorizonIsAConfigError) {
    EXPECT_THROW(validate_function(reference_f1(), 0), ConfigError);
}

// Property: every shipped kind is non-decreasing and deterministic.
TEST(PAFunctionProperty, RandomFunctionsAreMonotone) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double beta = std::min(1.0, u(rng) / 3.0);
        const PAFunction fs[] = {PAFunction::affine(u(rng), u(rng)),
                                 PAFunction::power(beta, u(rng), u(rng))};
        for (const auto& f : fs) {
            double prev = 0.0;
            for (Degree k = 1; k < 300; ++k) {
                const double v = f(k);
                ASSERT_GE(v, prev);
                ASSERT_EQ(v, f(k));
                prev = v;
            }
        }
    }
}

// Property: JSON serialization round-trips every kind and certificate.
TEST(PAFunctionJson, RoundTrip) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> values{0.5 + u(rng)};
        for (int i = 0; i < 4; ++i) values.push_back(values.back() + u(rng));
        const PAFunction fs[] = {
            PAFunction::affine(u(rng), 0.1 + u(rng)),
            PAFunction::power(0.05 + 0.9 * u(rng) / 2.0, u(rng), 0.1 + u(rng)),
            PAFunction::table(values, ConstantLast{}, 0.5 + u(rng)),
            PAFunction::table(values, AffineExtension{u(rng)}),
            PAFunction(Power{0.5, 0.0}, 1.0, BoundedCert{3.0 + u(rng)}),
        };
        for (const auto& f : fs) {
            const auto text = to_json(f).dump();
            EXPECT_EQ(parse_pa_function(text), f) << text;
        }
    }
}

TEST(PAFunctionJson, ParsesPresetsAndMinimalObjects) {
    EXPECT_EQ(parse_pa_function("f1"), reference_f1());
    EXPECT_EQ(parse_pa_function(R"({"kind":"power","beta":0.6666666666666666})"),
              PAFunction::power(2.0 / 3.0));
    const auto t = parse_pa_function(R"({"kind":"table","values":[1,2,2],"tail_rule":"constant_last"})");
    EXPECT_EQ(t(10), 2.0);
    const auto c = parse_pa_function(
        R"({"kind":"affine","delta":0,"certificate":{"type":"affine","delta":1}})");
    EXPECT_EQ(std::get<AffineCert>(c.certificate()).delta, 1.0);
}

TEST(PAFunctionJson, RejectsMalformedInput) {
    EXPECT_THROW(parse_pa_function("{"), FormatError);
    EXPECT_THROW(parse_pa_function(R"({"kind":"cubic"})"), FormatError);
    EXPECT_THROW(parse_pa_function(R"({"kind":"power"})"), FormatError);
    EXPECT_THROW(parse_pa_function(R"({"kind":"affine","certificate":{"type":"x"}})"), FormatError);
}
