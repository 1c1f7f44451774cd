#include "vortexstab/domain.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace vortexstab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

RobinEval DomainModel::robin(const Vec2& x, int order) const {
    // h(x) = g(x,x);  grad h = 2 grad1 g;  hess h = 2 hess11 + 2 hess12.
    PairEval pe = pair_eval(x, x, order);
    RobinEval out;
    out.h = pe.g;
    if (order >= 1) out.grad = 2.0 * pe.grad1;
    if (order >= 2) out.hess = 2.0 * (pe.hess11 + pe.hess12);
    return out;
}

// ---------------------------------------------------------------------------
// UnitDisc
// ---------------------------------------------------------------------------

PairEval UnitDisc::pair_eval(const Vec2& x, const Vec2& y, int order) const {
    if (!contains(x) || !contains(y))
        throw DomainError("unit disc: point outside the open disc");
    const double xx = x.squaredNorm(), yy = y.squaredNorm();
    const double q = xx * yy - 2.0 * x.dot(y) + 1.0;  // >= (1-|x||y|)^2 > 0
    PairEval out;
    out.g = -std::log(q) / (4.0 * kPi);
    if (order >= 1) {
        Vec2 q1 = 2.0 * yy * x - 2.0 * y;
        out.grad1 = -q1 / (4.0 * kPi * q);
        if (order >= 2) {
            Vec2 q2 = 2.0 * xx * y - 2.0 * x;
            Mat2 q11 = 2.0 * yy * Mat2::Identity();
            Mat2 q12 = 4.0 * x * y.transpose() - 2.0 * Mat2::Identity();
            out.hess11 = -(q11 / q - q1 * q1.transpose() / (q * q)) / (4.0 * kPi);
            out.hess12 = -(q12 / q - q1 * q2.transpose() / (q * q)) / (4.0 * kPi);
        }
    }
    return out;
}

RobinEval UnitDisc::robin(const Vec2& x, int order) const {
    if (!contains(x))
        throw DomainError("unit disc: Robin function requested outside the disc");
    const double s = 1.0 - x.squaredNorm();
    RobinEval out;
    out.h = -std::log(s) / (2.0 * kPi);
    if (order >= 1) out.grad = x / (kPi * s);
    if (order >= 2)
        out.hess = (Mat2::Identity() / s + 2.0 * x * x.transpose() / (s * s)) / kPi;
    return out;
}

// ---------------------------------------------------------------------------
// SyntheticQuadratic
// ---------------------------------------------------------------------------

SyntheticQuadratic::SyntheticQuadratic(const Mat2& s) : s_(s) {
    if (std::abs(s(0, 1) - s(1, 0)) > 1e-14 * (1.0 + s.cwiseAbs().maxCoeff()))
        throw ConfigError("synthetic-quadratic: S must be symmetric");
    s_(0, 1) = s_(1, 0) = 0.5 * (s(0, 1) + s(1, 0));
}

PairEval SyntheticQuadratic::pair_eval(const Vec2& x, const Vec2& y, int order) const {
    PairEval out;
    out.g = x.dot(s_ * y);
    if (order >= 1) out.grad1 = s_ * y;
    if (order >= 2) out.hess12 = s_;
    return out;
}

RobinEval SyntheticQuadratic::robin(const Vec2& x, int order) const {
    RobinEval out;
    out.h = x.dot(s_ * x);
    if (order >= 1) out.grad = 2.0 * s_ * x;
    if (order >= 2) out.hess = 2.0 * s_;
    return out;
}

void SyntheticQuadratic::write_config(Config& cfg) const {
    cfg.set("domain", tag());
    cfg.set("s11", s_(0, 0));
    cfg.set("s12", s_(0, 1));
    cfg.set("s22", s_(1, 1));
}

// ---------------------------------------------------------------------------
// ConformalImage
// ---------------------------------------------------------------------------

ConformalImage::ConformalImage(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty() || std::abs(coeffs_[0]) == 0.0)
        throw ConfigError("conformal-image: need coefficients c_1.. with c_1 != 0");
    // Derivative-nonvanishing check on the closed sample region |w| <= 0.999:
    // roots of the polynomial psi' from its companion matrix.
    const int deg = static_cast<int>(coeffs_.size()) - 1;  // degree of psi'
    if (deg > 0) {
        Complex lead = static_cast<double>(deg + 1) * coeffs_.back();
        CMatX companion = CMatX::Zero(deg, deg);
        for (int k = 0; k < deg; ++k) {
            companion(k, deg - 1) = -static_cast<double>(k + 1) * coeffs_[k] / lead;
            if (k + 1 < deg) companion(k + 1, k) = 1.0;
        }
        Eigen::ComplexEigenSolver<CMatX> roots(companion);
        for (Eigen::Index i = 0; i < roots.eigenvalues().size(); ++i)
            if (std::abs(roots.eigenvalues()[i]) <= 0.999)
                throw ConfigError(
                    "conformal-image: psi' vanishes inside the sample disc, map not univalent");
    }
    // Seed grid for the Newton inversion.
    for (int ir = 0; ir <= 12; ++ir) {
        double rad = 0.995 * ir / 12.0;
        int nth = ir == 0 ? 1 : 24;
        for (int it = 0; it < nth; ++it) {
            Complex w = std::polar(rad, 2.0 * kPi * it / nth);
            seed_w_.push_back(w);
            seed_img_.push_back(map(w));
        }
    }
}

Complex ConformalImage::map(Complex w) const {
    // Horner for psi(w) = c_1 w + ... + c_m w^m = w*(c_1 + w*(c_2 + ...)).
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * w + *it;
    return acc * w;
}

Complex ConformalImage::map_derivative(Complex w) const {
    Complex acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;)
        acc = acc * w + static_cast<double>(k + 1) * coeffs_[k];
    return acc;
}

Complex ConformalImage::invert(const Vec2& x) const {
    const Complex target(x[0], x[1]);
    // nearest grid seed
    Complex w = 0.0;
    double best = std::abs(seed_img_[0] - target);
    for (std::size_t i = 0; i < seed_w_.size(); ++i) {
        double d = std::abs(seed_img_[i] - target);
        if (d < best) {
            best = d;
            w = seed_w_[i];
        }
    }
    double res = std::abs(map(w) - target);
    for (int iter = 0; iter < 60; ++iter) {
        if (res < 1e-14) break;
        Complex dpsi = map_derivative(w);
        if (std::abs(dpsi) < 1e-12)
            throw InversionError("conformal-image: psi' ~ 0 during Newton inversion");
        Complex step = (map(w) - target) / dpsi;
        double damping = 1.0;
        Complex w_next = w - step;
        double res_next = std::abs(map(w_next) - target);
        while (res_next >= res && damping > 1e-4) {
            damping *= 0.5;
            w_next = w - damping * step;
            res_next = std::abs(map(w_next) - target);
        }
        if (res_next >= res)
            throw InversionError("conformal-image: Newton inversion stalled");
        w = w_next;
        res = res_next;
    }
    if (res >= 1e-10)
        throw InversionError("conformal-image: Newton inversion did not converge");
    return w;
}

bool ConformalImage::contains(const Vec2& x) const {
    try {
        return std::abs(invert(x)) < 1.0;
    } catch (const NumericalError&) {
        return false;
    }
}

double ConformalImage::value_at(const Vec2& x, const Vec2& y) const {
    Complex wx = invert(x), wy = invert(y);
    if (std::abs(wx) >= 1.0 || std::abs(wy) >= 1.0)
        throw DomainError("conformal-image: point outside the domain");
    Vec2 px(wx.real(), wx.imag()), py(wy.real(), wy.imag());
    UnitDisc disc;
    double g_disc = disc.pair_eval(px, py, 0).g;
    double sep_ratio;
    Complex dz(x[0] - y[0], x[1] - y[1]);
    if (std::abs(dz) < 1e-9) {
        // diagonal limit: |wx-wy|/|x-y| -> |phi'(x)| = 1/|psi'(w)|
        sep_ratio = 1.0 / std::abs(map_derivative(wx));
    } else {
        sep_ratio = std::abs(wx - wy) / std::abs(dz);
    }
    return g_disc + std::log(sep_ratio) / (2.0 * kPi);
}

double ConformalImage::robin_value_at(const Vec2& x) const {
    // h(x) = h_D(w) + log|phi'(x)|/(2pi) with phi' = 1/psi'(w)
    Complex w = invert(x);
    if (std::abs(w) >= 1.0)
        throw DomainError("conformal-image: point outside the domain");
    return -std::log((1.0 - std::norm(w)) * std::abs(map_derivative(w))) / (2.0 * kPi);
}

namespace {

// 4th-order central differences on a scalar field.
template <class F, class P>
double fd_d1(const F& f, const P& point, int axis, double step) {
    auto ev = [&](double d) {
        P p = point;
        p[axis] += d;
        return f(p);
    };
    return (-ev(2 * step) + 8 * ev(step) - 8 * ev(-step) + ev(-2 * step)) / (12 * step);
}

template <class F, class P>
double fd_d2(const F& f, const P& point, int axis, double step) {
    auto ev = [&](double d) {
        P p = point;
        p[axis] += d;
        return f(p);
    };
    return (-ev(2 * step) + 16 * ev(step) - 30 * ev(0.0) + 16 * ev(-step) - ev(-2 * step)) /
           (12 * step * step);
}

template <class F, class P>
double fd_cross(const F& f, const P& point, int a, int b, double step) {
    // 4th-order mixed derivative as d1 along a of (d1 along b).
    auto inner = [&](const P& q) {
        return fd_d1(f, q, b, step);
    };
    return fd_d1(inner, point, a, step);
}

}  // namespace

PairEval ConformalImage::pair_eval(const Vec2& x, const Vec2& y, int order) const {
    PairEval out;
    out.g = value_at(x, y);
    if (order < 1) return out;
    const double h1 = 1e-3, h2 = 2e-3;
    Eigen::Vector4d p;
    p << x[0], x[1], y[0], y[1];
    auto f = [&](const Eigen::Vector4d& q) {
        return value_at(Vec2(q[0], q[1]), Vec2(q[2], q[3]));
    };
    for (int a = 0; a < 2; ++a) out.grad1[a] = fd_d1(f, p, a, h1);
    if (order >= 2) {
        for (int a = 0; a < 2; ++a) {
            out.hess11(a, a) = fd_d2(f, p, a, h2);
            for (int b = 0; b < 2; ++b)
                out.hess12(a, b) = fd_cross(f, p, a, 2 + b, h2);
        }
        out.hess11(0, 1) = out.hess11(1, 0) = fd_cross(f, p, 0, 1, h2);
    }
    return out;
}

RobinEval ConformalImage::robin(const Vec2& x, int order) const {
    RobinEval out;
    out.h = robin_value_at(x);
    if (order < 1) return out;
    const double h1 = 1e-3, h2 = 2e-3;
    auto f = [&](const Vec2& q) { return robin_value_at(q); };
    for (int a = 0; a < 2; ++a) out.grad[a] = fd_d1(f, x, a, h1);
    if (order >= 2) {
        for (int a = 0; a < 2; ++a) out.hess(a, a) = fd_d2(f, x, a, h2);
        out.hess(0, 1) = out.hess(1, 0) = fd_cross(f, x, 0, 1, h2);
    }
    return out;
}

void ConformalImage::write_config(Config& cfg) const {
    cfg.set("domain", tag());
    std::vector<double> re, im;
    for (Complex c : coeffs_) {
        re.push_back(c.real());
        im.push_back(c.imag());
    }
    cfg.set("coeff_re", re);
    cfg.set("coeff_im", im);
}

void TranslatedDomain::write_config(Config& cfg) const {
    base_->write_config(cfg);
    cfg.set("center_x", center_[0]);
    cfg.set("center_y", center_[1]);
}

// ---------------------------------------------------------------------------
// factory
// ---------------------------------------------------------------------------

std::shared_ptr<const DomainModel> domain_from_config(const Config& cfg) {
    const std::string tag = cfg.get_string("domain");
    std::shared_ptr<const DomainModel> base;
    if (tag == "whole-plane") {
        base = std::make_shared<WholePlane>();
    } else if (tag == "unit-disc") {
        base = std::make_shared<UnitDisc>();
    } else if (tag == "synthetic-quadratic") {
        Mat2 s;
        s << cfg.get_double("s11"), cfg.get_double("s12"), cfg.get_double("s12"),
            cfg.get_double("s22");
        base = std::make_shared<SyntheticQuadratic>(s);
    } else if (tag == "conformal-image") {
        std::vector<double> re = cfg.get_double_list("coeff_re");
        std::vector<double> im = cfg.has("coeff_im") ? cfg.get_double_list("coeff_im")
                                                     : std::vector<double>(re.size(), 0.0);
        if (im.size() != re.size())
            throw ConfigError("conformal-image: coeff_re and coeff_im differ in length");
        std::vector<Complex> c(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) c[i] = Complex(re[i], im[i]);
        base = std::make_shared<ConformalImage>(std::move(c));
    } else {
        throw ConfigError("unknown domain tag '" + tag + "'");
    }
    if (cfg.has("center_x") || cfg.has("center_y")) {
        Vec2 c(cfg.get_double_or("center_x", 0.0), cfg.get_double_or("center_y", 0.0));
        return std::make_shared<TranslatedDomain>(base, c);
    }
    return base;
}

Config domain_to_config(const DomainModel& domain) {
    Config cfg;
    domain.write_config(cfg);
    return cfg;
}

}  // namespace vortexstab
