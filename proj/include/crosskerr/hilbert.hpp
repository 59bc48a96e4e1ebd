#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace crosskerr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Ordered collection of truncated bosonic (or two-level) modes.
/// Mode 0 is the leftmost tensor factor: for dims (d0, d1) the basis index is
/// i = n0 * d1 + n1.
class ModeSystem {
 public:
  struct Mode {
    std::string label;
    int dim;
  };

  ModeSystem() = default;
  explicit ModeSystem(std::vector<Mode> modes);

  int total_dim() const { return total_dim_; }
  std::size_t num_modes() const { return modes_.size(); }
  const Mode& mode(std::size_t i) const { return modes_[i]; }
  const std::vector<Mode>& modes() const { return modes_; }

  /// Index of the labeled mode; throws std::invalid_argument on unknown label.
  std::size_t mode_index(const std::string& label) const;
  bool has_mode(const std::string& label) const;
  int dim_of(const std::string& label) const;

  /// Flat basis index of the Fock occupation list (one entry per mode).
  int basis_index(const std::vector<int>& occupations) const;
  /// Occupation of mode `mode_i` in flat basis state `index`.
  int occupation(int index, std::size_t mode_i) const;
  /// Stride of mode `mode_i` in the flat index.
  int stride(std::size_t mode_i) const { return strides_[mode_i]; }

  bool operator==(const ModeSystem& other) const;
  bool operator!=(const ModeSystem& other) const { return !(*this == other); }

 private:
  std::vector<Mode> modes_;
  std::vector<int> strides_;
  int total_dim_ = 0;
};

/// Complex square matrix over the tensor-product space of a ModeSystem.
/// Hamiltonians built by the model layer are in angular units (rad/us).
class Operator {
 public:
  Operator() = default;
  Operator(ModeSystem system, Matrix matrix);

  const ModeSystem& system() const { return system_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  Operator adjoint() const { return Operator(system_, matrix_.adjoint()); }
  bool is_hermitian(double tol = 1e-10) const;

  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator operator*(const Operator& rhs) const;
  friend Operator operator*(Complex scalar, const Operator& op) {
    return Operator(op.system_, scalar * op.matrix_);
  }

 private:
  ModeSystem system_;
  Matrix matrix_;
};

/// Density matrix over a ModeSystem. Construction does not enforce
/// physicality; see is_physical() and the tomography module, which handles
/// deliberately unphysical least-squares estimates.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(ModeSystem system, Matrix matrix);

  static DensityMatrix from_state(const ModeSystem& system, const Vector& psi);

  const ModeSystem& system() const { return system_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  double trace() const { return matrix_.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;
  bool is_physical(double herm_tol = 1e-10, double trace_tol = 1e-9,
                   double eig_tol = 1e-10) const;

  Complex expectation(const Operator& op) const;

 private:
  ModeSystem system_;
  Matrix matrix_;
};

// -- Elementary operators ----------------------------------------------------

Operator identity(const ModeSystem& system);
/// Embeds a single-mode matrix on the labeled mode, identity elsewhere.
Operator embed(const ModeSystem& system, const std::string& label,
               const Matrix& local);
Operator annihilation(const ModeSystem& system, const std::string& label);
Operator creation(const ModeSystem& system, const std::string& label);
Operator number(const ModeSystem& system, const std::string& label);
/// |n><n| on the labeled mode.
Operator fock_projector(const ModeSystem& system, const std::string& label,
                        int n);
/// exp(alpha a^dag - alpha* a) on the labeled mode.
Operator displacement(const ModeSystem& system, const std::string& label,
                      Complex alpha);
/// (-1)^n on the labeled mode.
Operator parity_operator(const ModeSystem& system, const std::string& label);

// -- States ------------------------------------------------------------------

Vector basis_ket(const ModeSystem& system, const std::vector<int>& occupations);
/// Normalized superposition sum_i amps[i] |occs[i]>.
Vector superposition_ket(const ModeSystem& system,
                         const std::vector<std::vector<int>>& occs,
                         const std::vector<Complex>& amps);
DensityMatrix basis_state(const ModeSystem& system,
                          const std::vector<int>& occupations);

/// Traces out every mode not in `keep` (labels, in the order they appear in
/// the original system).
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::string>& keep);

// -- Matrix functions ----------------------------------------------------------

/// exp(-i H t) for Hermitian H (angular units), via eigendecomposition.
Matrix expm_unitary(const Matrix& hamiltonian, double t);
/// Hermitian matrix function f applied through the eigendecomposition.
Matrix hermitian_function(const Matrix& h, const std::function<double(double)>& f);

// -- Phase-space and distance functions ---------------------------------------

struct PhaseSpaceGrid {
  std::vector<double> re;  ///< monotone increasing real-axis samples
  std::vector<double> im;  ///< monotone increasing imaginary-axis samples
  Eigen::MatrixXd values;  ///< values(i, j) at re[i] + i*im[j]

  /// Trapezoidal integral of `values` over the grid.
  double integral() const;
};

/// Wigner function W(alpha) = (2/pi) tr[D^dag(alpha) rho_m D(alpha) P] of the
/// labeled mode; other modes are traced out first.
PhaseSpaceGrid wigner(const DensityMatrix& rho, const std::string& label,
                      const std::vector<double>& re_axis,
                      const std::vector<double>& im_axis);

/// Uhlmann fidelity F = (tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2.
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Fidelity of rho against a pure target ket: <psi|rho|psi>.
double fidelity_to_pure(const DensityMatrix& rho, const Vector& psi);

// -- Logical-qubit readout -----------------------------------------------------

struct PauliBars {
  /// Expectation values indexed [p_a * 4 + p_b] with 0=I, 1=X, 2=Y, 3=Z.
  std::array<double, 16> values{};
  /// Population outside the two-mode code space.
  double leakage = 0.0;

  static const std::array<const char*, 16>& labels();
  double operator[](const std::string& label) const;
};

/// Two-qubit Pauli expectations of a two-mode state with Fock codewords
/// (n0, n1) per mode: logical |0_L> = |n0>, |1_L> = |n1>.
PauliBars pauli_bars(const DensityMatrix& rho,
                     std::pair<int, int> codewords_a,
                     std::pair<int, int> codewords_b);

}  // namespace crosskerr
