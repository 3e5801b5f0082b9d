#include "cqed/hilbert.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cqed {

HilbertSpace::HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    dim_ = 1;
    for (const auto& f : factors_) {
        if (f.dim < 1) throw std::invalid_argument("factor '" + f.label + "' has non-positive dim");
        if (!seen.insert(f.label).second)
            throw std::invalid_argument("duplicate factor label '" + f.label + "'");
        dim_ *= f.dim;
    }
}

int HilbertSpace::factor_index(const std::string& label) const {
    for (int i = 0; i < n_factors(); ++i)
        if (factors_[i].label == label) return i;
    throw std::invalid_argument("no factor labeled '" + label + "'");
}

bool HilbertSpace::has_label(const std::string& label) const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [&](const Factor& f) { return f.label == label; });
}

std::vector<int> HilbertSpace::strides() const {
    std::vector<int> s(factors_.size(), 1);
    for (int i = n_factors() - 2; i >= 0; --i) s[i] = s[i + 1] * factors_[i + 1].dim;
    return s;
}

int HilbertSpace::pack(const std::vector<int>& multi_index) const {
    if (static_cast<int>(multi_index.size()) != n_factors())
        throw std::invalid_argument("multi-index rank mismatch");
    auto s = strides();
    int idx = 0;
    for (int i = 0; i < n_factors(); ++i) {
        if (multi_index[i] < 0 || multi_index[i] >= factors_[i].dim)
            throw std::invalid_argument("multi-index out of range for factor '" + factors_[i].label + "'");
        idx += multi_index[i] * s[i];
    }
    return idx;
}

std::vector<int> HilbertSpace::unpack(int index) const {
    std::vector<int> mi(factors_.size());
    auto s = strides();
    for (int i = 0; i < n_factors(); ++i) {
        mi[i] = index / s[i];
        index %= s[i];
    }
    return mi;
}

bool HilbertSpace::operator==(const HilbertSpace& o) const {
    if (factors_.size() != o.factors_.size()) return false;
    for (size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label != o.factors_[i].label || factors_[i].dim != o.factors_[i].dim)
            return false;
    return true;
}

StateVector StateVector::normalized() const {
    double n = amps.norm();
    if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
    return {space, amps / n};
}

StateVector basis_state(const HilbertSpace& space, const std::vector<int>& occupation) {
    Vec v = Vec::Zero(space.dim());
    v(space.pack(occupation)) = 1.0;
    return {space, v};
}

OperatorMatrix identity_op(const HilbertSpace& space) {
    return {space, Mat::Identity(space.dim(), space.dim())};
}

namespace {

HilbertSpace concat_spaces(const HilbertSpace& a, const HilbertSpace& b) {
    for (const auto& f : b.factors())
        if (a.has_label(f.label))
            throw std::invalid_argument("factor label collision on '" + f.label + "'");
    std::vector<Factor> fs = a.factors();
    fs.insert(fs.end(), b.factors().begin(), b.factors().end());
    return HilbertSpace(fs);
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* who) {
    if (a != b) throw std::invalid_argument(std::string(who) + ": space mismatch");
}

}  // namespace

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    HilbertSpace s = concat_spaces(a.space, b.space);
    Vec v(s.dim());
    for (Eigen::Index i = 0; i < a.amps.size(); ++i)
        v.segment(i * b.amps.size(), b.amps.size()) = a.amps(i) * b.amps;
    return {s, v};
}

OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b) {
    return {concat_spaces(a.space, b.space), kron(a.m, b.m)};
}

bool is_hermitian(const Mat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    // squared magnitudes on the upper triangle only, avoiding a hypot per entry
    double worst2 = 0.0, scale2 = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i <= j; ++i) {
            const cxd u = a(i, j), lc = std::conj(a(j, i));
            scale2 = std::max({scale2, std::norm(u), std::norm(lc)});
            worst2 = std::max(worst2, std::norm(u - lc));
        }
    const double bound = tol * std::max(1.0, std::sqrt(scale2));
    return worst2 <= bound * bound;
}

Mat propagator_hermitian(const Mat& h, double t) {
    if (!is_hermitian(h)) throw std::invalid_argument("propagator_hermitian: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases = (cxd(0, -t) * es.eigenvalues().cast<cxd>().array()).exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat propagator_general(const Mat& h, double t) {
    Mat a = cxd(0, -t) * h;
    return a.exp();
}

StateVector evolve_const(const OperatorMatrix& h, const StateVector& psi0, double t) {
    require_same_space(h.space, psi0.space, "evolve_const");
    Mat u = is_hermitian(h.m) ? propagator_hermitian(h.m, t) : propagator_general(h.m, t);
    return {psi0.space, u * psi0.amps};
}

StateVector evolve_timedep(const std::function<OperatorMatrix(double)>& hgen,
                           const StateVector& psi0, double t, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("evolve_timedep: dt must be positive");
    if (t == 0.0) return psi0;
    if (t < 0.0) throw std::invalid_argument("evolve_timedep: negative time");

    auto sample = [&](double s) -> Mat {
        OperatorMatrix h = hgen(s);
        require_same_space(h.space, psi0.space, "evolve_timedep");
        if (!is_hermitian(h.m, 1e-10))
            throw std::invalid_argument("evolve_timedep: non-Hermitian sample at t=" + std::to_string(s));
        return std::move(h.m);
    };

    const long n = std::max(1L, static_cast<long>(std::ceil(t / dt)));
    const double h = t / static_cast<double>(n);
    const cxd mi(0.0, -1.0);

    Vec psi = psi0.amps;
    Vec k1, k2, k3, k4;
    for (long i = 0; i < n; ++i) {
        const double s = h * static_cast<double>(i);
        Mat h0 = sample(s);
        Mat hm = sample(s + h / 2.0);
        Mat h1 = sample(s + h);
        k1.noalias() = mi * (h0 * psi);
        k2.noalias() = mi * (hm * (psi + (h / 2.0) * k1));
        k3.noalias() = mi * (hm * (psi + (h / 2.0) * k2));
        k4.noalias() = mi * (h1 * (psi + h * k3));
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return {psi0.space, psi};
}

double fidelity(const StateVector& psi, const StateVector& phi) {
    require_same_space(psi.space, phi.space, "fidelity");
    if (std::abs(psi.norm2() - 1.0) > 1e-9 || std::abs(phi.norm2() - 1.0) > 1e-9)
        throw std::invalid_argument("fidelity: unnormalized input");
    return std::norm(psi.amps.dot(phi.amps));
}

double fidelity_mixed(const Mat& rho, const Mat& sigma) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    Vec w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cxd>();
    Mat sq = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es2(sq * sigma * sq);
    double tr = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

std::pair<StateVector, double> project(const StateVector& psi,
                                       const std::string& factor_label,
                                       int outcome_index) {
    const int fi = psi.space.factor_index(factor_label);
    const auto& fs = psi.space.factors();
    if (outcome_index < 0 || outcome_index >= fs[fi].dim)
        throw std::invalid_argument("project: outcome index out of range");

    std::vector<Factor> rest;
    for (int i = 0; i < psi.space.n_factors(); ++i)
        if (i != fi) rest.push_back(fs[i]);
    HilbertSpace rspace{rest};

    Vec out = Vec::Zero(rspace.dim());
    for (int idx = 0; idx < psi.space.dim(); ++idx) {
        auto mi = psi.space.unpack(idx);
        if (mi[fi] != outcome_index) continue;
        std::vector<int> rmi;
        for (int i = 0; i < psi.space.n_factors(); ++i)
            if (i != fi) rmi.push_back(mi[i]);
        out(rspace.pack(rmi)) += psi.amps(idx);
    }
    const double prob = out.squaredNorm();
    if (prob < 1e-14)
        throw std::domain_error("project: zero-probability outcome, conditional state undefined");
    return {{rspace, out / std::sqrt(prob)}, prob};
}

OperatorMatrix reduced_state(const StateVector& psi, const std::vector<std::string>& keep_labels) {
    if (keep_labels.empty()) throw std::invalid_argument("reduced_state: empty keep list");
    std::vector<bool> keep(psi.space.n_factors(), false);
    for (const auto& l : keep_labels) keep[psi.space.factor_index(l)] = true;

    std::vector<Factor> kept, traced;
    for (int i = 0; i < psi.space.n_factors(); ++i)
        (keep[i] ? kept : traced).push_back(psi.space.factors()[i]);
    HilbertSpace kspace{kept}, tspace{traced};

    // reshape into (kept x traced) and contract the traced side
    Mat resh = Mat::Zero(kspace.dim(), tspace.dim());
    for (int idx = 0; idx < psi.space.dim(); ++idx) {
        auto mi = psi.space.unpack(idx);
        std::vector<int> kmi, tmi;
        for (int i = 0; i < psi.space.n_factors(); ++i)
            (keep[i] ? kmi : tmi).push_back(mi[i]);
        resh(kspace.pack(kmi), tspace.dim() == 1 ? 0 : tspace.pack(tmi)) = psi.amps(idx);
    }
    Mat rho = resh * resh.adjoint();
    return {kspace, rho};
}

}  // namespace cqed
