#include "vortexstab/hamiltonian.hpp"

namespace vortexstab {

double whole_plane_energy(const VecX& z, const Vorticities& vort) {
    return detail::whole_plane_energy_t<double>(z, vort.gamma());
}

VecX whole_plane_gradient(const VecX& z, const Vorticities& vort) {
    VecX g(z.size());
    detail::whole_plane_gradient_t<double>(z, vort.gamma(), g);
    return g;
}

MatX whole_plane_hessian(const VecX& z, const Vorticities& vort) {
    MatX h = MatX::Zero(z.size(), z.size());
    detail::whole_plane_hessian_t<double>(z, vort.gamma(), h);
    return h;
}

double interaction_energy(const DomainModel& domain, const VecX& z, const Vorticities& vort) {
    const int n = vort.count();
    double f = 0.0;
    for (int j = 0; j < n; ++j) {
        Vec2 zj = z.segment<2>(2 * j);
        f += vort.gamma(j) * vort.gamma(j) * domain.pair_eval(zj, zj, 0).g;
        for (int k = j + 1; k < n; ++k)
            f += 2.0 * vort.gamma(j) * vort.gamma(k) *
                 domain.pair_eval(zj, z.segment<2>(2 * k), 0).g;
    }
    return f;
}

VecX interaction_gradient(const DomainModel& domain, const VecX& z, const Vorticities& vort) {
    // grad_{z_j} F = 2 G_j sum_k G_k grad1 g(z_j, z_k); the diagonal term is
    // covered by the same formula through the symmetry of g.
    const int n = vort.count();
    VecX g = VecX::Zero(z.size());
    for (int j = 0; j < n; ++j) {
        Vec2 zj = z.segment<2>(2 * j);
        Vec2 acc = Vec2::Zero();
        for (int k = 0; k < n; ++k)
            acc += vort.gamma(k) * domain.pair_eval(zj, z.segment<2>(2 * k), 1).grad1;
        g.segment<2>(2 * j) = 2.0 * vort.gamma(j) * acc;
    }
    return g;
}

MatX interaction_hessian(const DomainModel& domain, const VecX& z, const Vorticities& vort) {
    const int n = vort.count();
    MatX h = MatX::Zero(z.size(), z.size());
    for (int j = 0; j < n; ++j) {
        Vec2 zj = z.segment<2>(2 * j);
        for (int k = 0; k < n; ++k) {
            PairEval pe = domain.pair_eval(zj, z.segment<2>(2 * k), 2);
            h.block<2, 2>(2 * j, 2 * j) += 2.0 * vort.gamma(j) * vort.gamma(k) * pe.hess11;
            if (k != j)
                h.block<2, 2>(2 * j, 2 * k) += 2.0 * vort.gamma(j) * vort.gamma(k) * pe.hess12;
            else
                h.block<2, 2>(2 * j, 2 * j) += 2.0 * vort.gamma(j) * vort.gamma(j) * pe.hess12;
        }
    }
    return h;
}

ScaledHamiltonian::ScaledHamiltonian(std::shared_ptr<const DomainModel> domain, Vorticities vort,
                                     double r)
    : domain_(std::move(domain)), vort_(std::move(vort)), r_(r) {
    if (!domain_)
        throw ConfigError("scaled hamiltonian: null domain");
    if (r_ < 0.0 || !std::isfinite(r_))
        throw ConfigError("scaled hamiltonian: scale r must be >= 0");
    VecX origin = VecX::Zero(2 * vort_.count());
    f0_ = interaction_energy(*domain_, origin, vort_);
}

void ScaledHamiltonian::check_admissible(const VecX& u) const {
    if (r_ == 0.0) return;
    for (int j = 0; j < vort_.count(); ++j)
        if (!domain_->contains(r_ * u.segment<2>(2 * j)))
            throw DomainError("vortex " + std::to_string(j + 1) + " left the domain");
}

double ScaledHamiltonian::value(const VecX& u) const {
    double h0 = whole_plane_energy(u, vort_);
    if (r_ == 0.0) return h0;
    check_admissible(u);
    return h0 - interaction_energy(*domain_, r_ * u, vort_) + f0_;
}

VecX ScaledHamiltonian::gradient(const VecX& u) const {
    VecX g = whole_plane_gradient(u, vort_);
    if (r_ == 0.0) return g;
    check_admissible(u);
    return g - r_ * interaction_gradient(*domain_, r_ * u, vort_);
}

MatX ScaledHamiltonian::hessian(const VecX& u) const {
    MatX h = whole_plane_hessian(u, vort_);
    if (r_ == 0.0) return h;
    check_admissible(u);
    return h - r_ * r_ * interaction_hessian(*domain_, r_ * u, vort_);
}

VecX ScaledHamiltonian::vector_field(const VecX& u) const {
    VecX g = apply_jn(gradient(u));
    return g.cwiseQuotient(vort_.mgamma());
}

MatX ScaledHamiltonian::variational_matrix(const VecX& u) const {
    MatX h = hessian(u);
    MatX a(h.rows(), h.cols());
    const VecX minv = vort_.mgamma_inverse();
    // rows of J_N * H: row 2j is row 2j+1 of H, row 2j+1 is -row 2j of H
    for (int j = 0; j < vort_.count(); ++j) {
        a.row(2 * j) = minv[2 * j] * h.row(2 * j + 1);
        a.row(2 * j + 1) = -minv[2 * j + 1] * h.row(2 * j);
    }
    return a;
}

}  // namespace vortexstab
