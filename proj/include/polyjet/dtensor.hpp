#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyjet/chart.hpp"
#include "polyjet/metric.hpp"
#include "polyjet/report.hpp"
#include "polyjet/tensor.hpp"

namespace polyjet {

enum class Family { temporal, spatial };
enum class Variance { upper, lower };

/// One index slot of a d-tensor. A doubled pair ("(i) over (a)") links one
/// spatial and one temporal slot of opposite variance through `partner`; it
/// transforms with the product of the two plain factors.
struct IndexSlot {
    Family family;
    Variance variance;
    std::optional<std::size_t> partner;
    std::string letter;  ///< used only for reporting

    static IndexSlot upper_t(std::string letter, std::optional<std::size_t> partner = {}) {
        return {Family::temporal, Variance::upper, partner, std::move(letter)};
    }
    static IndexSlot lower_t(std::string letter, std::optional<std::size_t> partner = {}) {
        return {Family::temporal, Variance::lower, partner, std::move(letter)};
    }
    static IndexSlot upper_x(std::string letter, std::optional<std::size_t> partner = {}) {
        return {Family::spatial, Variance::upper, partner, std::move(letter)};
    }
    static IndexSlot lower_x(std::string letter, std::optional<std::size_t> partner = {}) {
        return {Family::spatial, Variance::lower, partner, std::move(letter)};
    }

    friend bool operator==(const IndexSlot&, const IndexSlot&) = default;
};

/// Components of a distinguished tensor field in (t, x, p), one axis per
/// slot (temporal axes have size m, spatial axes size n).
class DTensorField {
public:
    /// Throws DimensionError on a shape mismatch and ConfigError on a
    /// malformed doubled pair.
    DTensorField(const JetChart& chart, std::vector<IndexSlot> slots, ExprArray components);

    static DTensorField scalar(const JetChart& chart, const Expr& value);
    static DTensorField zeros(const JetChart& chart, std::vector<IndexSlot> slots);

    const JetChart& chart() const { return chart_; }
    const std::vector<IndexSlot>& slots() const { return slots_; }
    const ExprArray& components() const { return components_; }
    std::size_t rank() const { return slots_.size(); }
    std::vector<std::string> letters() const;

    /// Shape implied by the slots.
    static std::vector<std::size_t> shape_for(const JetChart& chart,
                                              const std::vector<IndexSlot>& slots);

    /// Componentwise sum/difference; slots must agree.
    friend DTensorField operator+(const DTensorField& a, const DTensorField& b);
    friend DTensorField operator-(const DTensorField& a, const DTensorField& b);
    DTensorField scaled(const Expr& c) const;

private:
    JetChart chart_;
    std::vector<IndexSlot> slots_;
    ExprArray components_;
};

/// Applies one Jacobian factor per slot to numeric components: the tilde
/// components at the image point. With `inverse` the factors of the inverse
/// group element are used instead (tilde components back to chart A).
NumArray apply_slot_factors(const std::vector<IndexSlot>& slots, const InducedAt& at,
                            const NumArray& values, bool inverse = false);

/// Components in the tilde chart at the image of q. Throws SingularJacobian.
NumArray transform_dtensor(const DTensorField& T, const TransitionMap& tm, const JetPoint& q);
NumArray transform_dtensor(const DTensorField& T, const InducedTransform& it, const JetPoint& q);

inline constexpr double kDefaultLawTolerance = 1e-8;

/// Max absolute residual of transform_dtensor(T_A) - T_B(image) over dom.
/// T_A is in chart-A variables, T_B in chart-B variables; dom samples chart A.
VerificationReport verify_dtensor_law(const DTensorField& T_A, const DTensorField& T_B,
                                      const TransitionMap& tm, const SampleDomain& dom,
                                      double tol = kDefaultLawTolerance);
VerificationReport verify_dtensor_law(const DTensorField& T_A, const DTensorField& T_B,
                                      const InducedTransform& it, const SampleDomain& dom,
                                      double tol = kDefaultLawTolerance);

struct BuiltinDTensors {
    DTensorField liouville;            ///< C*^(a)_(i) = p_i^a, axes (a, i)
    DTensorField polymomentum_liouville;  ///< L^(c)_(j)ab = h_ab p_j^c, axes (c, j, a, b)
    DTensorField normalization;        ///< J^(i)_(a)bj = h_ab delta^i_j, axes (i, a, b, j)
};

/// Throws ConfigError unless h is temporal.
BuiltinDTensors builtin_dtensors(const Metric& h);

/// The same field written in chart B: factors and arguments re-expressed
/// through the inverse maps. Exact, symbolic.
DTensorField pushforward(const DTensorField& T, const InducedTransform& it);

/// Contracts the doubled pair of `T` at `t_slot` (with its partner) against
/// the doubled pair of `U` at `u_slot`. The pairs must have opposite
/// variances slot by slot. Result slots: T's remaining slots, then U's.
DTensorField contract_pairs(const DTensorField& T, std::size_t t_slot, const DTensorField& U,
                            std::size_t u_slot);

}  // namespace polyjet
