#pragma once

#include "vortexstab/config.hpp"
#include "vortexstab/types.hpp"

#include <complex>
#include <memory>

namespace vortexstab {

/// Regular part g(x,y) of the Green's function at a point pair, with the
/// derivatives needed to assemble gradients and Hessians of the interaction
/// energy F.  Derivatives are with respect to the first slot (grad1, hess11)
/// and the mixed slot (hess12)[a][b] = d^2 g / dx_a dy_b; symmetry of g
/// supplies the rest.
struct PairEval {
    double g = 0.0;
    Vec2 grad1 = Vec2::Zero();
    Mat2 hess11 = Mat2::Zero();
    Mat2 hess12 = Mat2::Zero();
};

/// Robin function h(x) = g(x,x) with gradient and Hessian.
struct RobinEval {
    double h = 0.0;
    Vec2 grad = Vec2::Zero();
    Mat2 hess = Mat2::Zero();
};

/// A planar domain supplying the regular part g of its Green's function.
///
/// Variants:
///   WholePlane          g == 0
///   UnitDisc            analytic g and h of the Dirichlet disc
///   SyntheticQuadratic  g(x,y) = x^T S y, used to manufacture saddle or
///                       extremum Robin functions with exact Hessian 2S
///   ConformalImage      psi(unit disc) for a polynomial psi, evaluated by
///                       numerically inverting psi
///   Translated          any of the above recentred so a chosen point maps
///                       to the origin
class DomainModel {
public:
    virtual ~DomainModel() = default;

    /// order 0: value only; order 1: +grad1; order 2: +hessians.
    virtual PairEval pair_eval(const Vec2& x, const Vec2& y, int order) const = 0;

    /// Diagonal evaluation; the default derives h from pair_eval by symmetry.
    virtual RobinEval robin(const Vec2& x, int order) const;

    virtual bool contains(const Vec2& x) const = 0;
    virtual std::string tag() const = 0;
    virtual void write_config(Config& cfg) const = 0;

    /// True only for the whole plane (g identically zero); the continuation
    /// machinery uses this to recognise the trivial constant family.
    virtual bool is_trivial() const { return false; }

    double regular_part(const Vec2& x, const Vec2& y) const { return pair_eval(x, y, 0).g; }
    double robin_value(const Vec2& x) const { return robin(x, 0).h; }
};

class WholePlane final : public DomainModel {
public:
    PairEval pair_eval(const Vec2&, const Vec2&, int) const override { return {}; }
    RobinEval robin(const Vec2&, int) const override { return {}; }
    bool contains(const Vec2&) const override { return true; }
    std::string tag() const override { return "whole-plane"; }
    void write_config(Config& cfg) const override { cfg.set("domain", tag()); }
    bool is_trivial() const override { return true; }
};

/// Dirichlet disc.  With q(x,y) = |x|^2|y|^2 - 2<x,y> + 1 the image
/// construction gives g(x,y) = -log(q)/(4 pi), smooth on the open bidisc,
/// and h(x) = -log(1-|x|^2)/(2 pi) on the diagonal.
class UnitDisc final : public DomainModel {
public:
    PairEval pair_eval(const Vec2& x, const Vec2& y, int order) const override;
    RobinEval robin(const Vec2& x, int order) const override;
    bool contains(const Vec2& x) const override { return x.squaredNorm() < 1.0; }
    std::string tag() const override { return "unit-disc"; }
    void write_config(Config& cfg) const override { cfg.set("domain", tag()); }
};

/// g(x,y) = x^T S y for a symmetric 2x2 matrix S; h(x) = x^T S x.
class SyntheticQuadratic final : public DomainModel {
public:
    explicit SyntheticQuadratic(const Mat2& s);
    PairEval pair_eval(const Vec2& x, const Vec2& y, int order) const override;
    RobinEval robin(const Vec2& x, int order) const override;
    bool contains(const Vec2&) const override { return true; }
    std::string tag() const override { return "synthetic-quadratic"; }
    void write_config(Config& cfg) const override;
    const Mat2& matrix() const { return s_; }

private:
    Mat2 s_;
};

/// Image of the unit disc under a polynomial map psi(w) = sum_k c_k w^k,
/// c_1 != 0.  g is pulled back from the disc through phi = psi^{-1}
/// (damped complex Newton seeded from a precomputed grid); derivatives use
/// 4th-order central differences.
class ConformalImage final : public DomainModel {
public:
    explicit ConformalImage(std::vector<Complex> coeffs);

    PairEval pair_eval(const Vec2& x, const Vec2& y, int order) const override;
    RobinEval robin(const Vec2& x, int order) const override;
    bool contains(const Vec2& x) const override;
    std::string tag() const override { return "conformal-image"; }
    void write_config(Config& cfg) const override;

    Complex map(Complex w) const;
    Complex map_derivative(Complex w) const;
    /// phi(x): disc preimage of a domain point; throws InversionError /
    /// DomainError.
    Complex invert(const Vec2& x) const;
    const std::vector<Complex>& coefficients() const { return coeffs_; }

private:
    double value_at(const Vec2& x, const Vec2& y) const;  // g via pullback
    double robin_value_at(const Vec2& x) const;

    std::vector<Complex> coeffs_;  // c_1..c_m
    std::vector<Complex> seed_w_, seed_img_;
};

/// base domain with coordinates shifted so `center` becomes the origin:
/// g'(x,y) = g(x + center, y + center).
class TranslatedDomain final : public DomainModel {
public:
    TranslatedDomain(std::shared_ptr<const DomainModel> base, const Vec2& center)
        : base_(std::move(base)), center_(center) {}

    PairEval pair_eval(const Vec2& x, const Vec2& y, int order) const override {
        return base_->pair_eval(x + center_, y + center_, order);
    }
    RobinEval robin(const Vec2& x, int order) const override {
        return base_->robin(x + center_, order);
    }
    bool contains(const Vec2& x) const override { return base_->contains(x + center_); }
    std::string tag() const override { return "translated"; }
    void write_config(Config& cfg) const override;
    bool is_trivial() const override { return base_->is_trivial(); }

private:
    std::shared_ptr<const DomainModel> base_;
    Vec2 center_;
};

std::shared_ptr<const DomainModel> domain_from_config(const Config& cfg);
Config domain_to_config(const DomainModel& domain);

}  // namespace vortexstab
