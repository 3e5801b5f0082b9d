#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cqed {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

struct Factor {
    std::string label;
    int dim = 0;
};

// ordered list of labeled tensor factors; amplitude indexing is row-major
// over the factors in declared order (first factor varies slowest)
class HilbertSpace {
public:
    HilbertSpace() = default;
    explicit HilbertSpace(std::vector<Factor> factors);

    int dim() const { return dim_; }
    const std::vector<Factor>& factors() const { return factors_; }
    int n_factors() const { return static_cast<int>(factors_.size()); }

    // position of a labeled factor; throws std::invalid_argument if absent
    int factor_index(const std::string& label) const;
    bool has_label(const std::string& label) const;

    // index arithmetic for the row-major layout
    std::vector<int> strides() const;
    int pack(const std::vector<int>& multi_index) const;
    std::vector<int> unpack(int index) const;

    bool operator==(const HilbertSpace& o) const;
    bool operator!=(const HilbertSpace& o) const { return !(*this == o); }

private:
    std::vector<Factor> factors_;
    int dim_ = 1;
};

struct StateVector {
    HilbertSpace space;
    Vec amps;

    double norm2() const { return amps.squaredNorm(); }
    StateVector normalized() const;
};

struct OperatorMatrix {
    HilbertSpace space;
    Mat m;
};

// basis state with the given occupation per factor
StateVector basis_state(const HilbertSpace& space, const std::vector<int>& occupation);
OperatorMatrix identity_op(const HilbertSpace& space);

// Kronecker products in declared factor order; label collisions are errors
StateVector tensor(const StateVector& a, const StateVector& b);
OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b);

Mat kron(const Mat& a, const Mat& b);
bool is_hermitian(const Mat& a, double tol = 1e-12);

// exp(-i H t), eigendecomposition route; requires Hermitian H
Mat propagator_hermitian(const Mat& h, double t);
// exp(-i H t), scaling-and-squaring route; H may be non-Hermitian
Mat propagator_general(const Mat& h, double t);

// exp(-iHt) psi0. Hermitian H takes the eigendecomposition route and
// preserves the norm; a non-Hermitian H (conditional no-decay evolution)
// takes scaling-and-squaring and the squared norm decays monotonically when
// the anti-Hermitian part is negative semidefinite.
StateVector evolve_const(const OperatorMatrix& h, const StateVector& psi0, double t);

// fixed-step classical Runge-Kutta integration of i dpsi/dt = H(t) psi.
// every sampled H(t) must be Hermitian; halving dt shrinks the error by
// roughly 2^4 (fourth order).
StateVector evolve_timedep(const std::function<OperatorMatrix(double)>& hgen,
                           const StateVector& psi0, double t, double dt);

// |<psi|phi>|^2 for normalized pure states (tolerance 1e-9 on the norms)
double fidelity(const StateVector& psi, const StateVector& phi);

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for density matrices
double fidelity_mixed(const Mat& rho, const Mat& sigma);

// measure one factor: returns the normalized post-measurement state on the
// remaining factors and the outcome probability; zero-probability outcomes
// have no defined conditional state and throw std::domain_error
std::pair<StateVector, double> project(const StateVector& psi,
                                       const std::string& factor_label,
                                       int outcome_index);

// partial trace down to the kept factors (original factor order preserved)
OperatorMatrix reduced_state(const StateVector& psi,
                             const std::vector<std::string>& keep_labels);

}  // namespace cqed
