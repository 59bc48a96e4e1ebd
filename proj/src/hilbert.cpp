#include "crosskerr/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace crosskerr {

namespace {

void check_same_system(const ModeSystem& a, const ModeSystem& b,
                       const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) +
                                ": operands live on different mode systems");
  }
}

}  // namespace

ModeSystem::ModeSystem(std::vector<Mode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) {
    throw std::invalid_argument("ModeSystem: needs at least one mode");
  }
  std::set<std::string> seen;
  total_dim_ = 1;
  for (const auto& m : modes_) {
    if (m.dim < 2) {
      throw std::invalid_argument("ModeSystem: mode '" + m.label +
                                  "' has dimension < 2");
    }
    if (!seen.insert(m.label).second) {
      throw std::invalid_argument("ModeSystem: duplicate label '" + m.label +
                                  "'");
    }
    total_dim_ *= m.dim;
  }
  strides_.resize(modes_.size());
  int s = 1;
  for (int i = static_cast<int>(modes_.size()) - 1; i >= 0; --i) {
    strides_[i] = s;
    s *= modes_[i].dim;
  }
}

std::size_t ModeSystem::mode_index(const std::string& label) const {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].label == label) return i;
  }
  throw std::invalid_argument("ModeSystem: unknown mode label '" + label + "'");
}

bool ModeSystem::has_mode(const std::string& label) const {
  return std::any_of(modes_.begin(), modes_.end(),
                     [&](const Mode& m) { return m.label == label; });
}

int ModeSystem::dim_of(const std::string& label) const {
  return modes_[mode_index(label)].dim;
}

int ModeSystem::basis_index(const std::vector<int>& occupations) const {
  if (occupations.size() != modes_.size()) {
    throw std::invalid_argument("basis_index: wrong number of occupations");
  }
  int idx = 0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (occupations[i] < 0 || occupations[i] >= modes_[i].dim) {
      throw std::invalid_argument(
          "basis_index: occupation out of range for '" + modes_[i].label +
          "'");
    }
    idx += occupations[i] * strides_[i];
  }
  return idx;
}

int ModeSystem::occupation(int index, std::size_t mode_i) const {
  return (index / strides_[mode_i]) % modes_[mode_i].dim;
}

bool ModeSystem::operator==(const ModeSystem& other) const {
  if (modes_.size() != other.modes_.size()) return false;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].label != other.modes_[i].label ||
        modes_[i].dim != other.modes_[i].dim) {
      return false;
    }
  }
  return true;
}

Operator::Operator(ModeSystem system, Matrix matrix)
    : system_(std::move(system)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != system_.total_dim() ||
      matrix_.cols() != system_.total_dim()) {
    throw std::invalid_argument("Operator: matrix size does not match system");
  }
}

bool Operator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator Operator::operator+(const Operator& rhs) const {
  check_same_system(system_, rhs.system_, "Operator+");
  return Operator(system_, matrix_ + rhs.matrix_);
}

Operator Operator::operator-(const Operator& rhs) const {
  check_same_system(system_, rhs.system_, "Operator-");
  return Operator(system_, matrix_ - rhs.matrix_);
}

Operator Operator::operator*(const Operator& rhs) const {
  check_same_system(system_, rhs.system_, "Operator*");
  return Operator(system_, matrix_ * rhs.matrix_);
}

DensityMatrix::DensityMatrix(ModeSystem system, Matrix matrix)
    : system_(std::move(system)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != system_.total_dim() ||
      matrix_.cols() != system_.total_dim()) {
    throw std::invalid_argument(
        "DensityMatrix: matrix size does not match system");
  }
}

DensityMatrix DensityMatrix::from_state(const ModeSystem& system,
                                        const Vector& psi) {
  if (psi.size() != system.total_dim()) {
    throw std::invalid_argument("from_state: ket size does not match system");
  }
  return DensityMatrix(system, psi * psi.adjoint());
}

double DensityMatrix::purity() const {
  return (matrix_ * matrix_).trace().real();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (matrix_ + matrix_.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool DensityMatrix::is_physical(double herm_tol, double trace_tol,
                                double eig_tol) const {
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > herm_tol) {
    return false;
  }
  if (std::abs(trace() - 1.0) > trace_tol) return false;
  return min_eigenvalue() >= -eig_tol;
}

Complex DensityMatrix::expectation(const Operator& op) const {
  check_same_system(system_, op.system(), "expectation");
  return (matrix_ * op.matrix()).trace();
}

Operator identity(const ModeSystem& system) {
  return Operator(system,
                  Matrix::Identity(system.total_dim(), system.total_dim()));
}

Operator embed(const ModeSystem& system, const std::string& label,
               const Matrix& local) {
  const std::size_t k = system.mode_index(label);
  const int d = system.mode(k).dim;
  if (local.rows() != d || local.cols() != d) {
    throw std::invalid_argument("embed: local matrix size does not match '" +
                                label + "'");
  }
  const int n = system.total_dim();
  const int stride = system.stride(k);
  Matrix out = Matrix::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const int nc = system.occupation(col, k);
    const int base = col - nc * stride;
    for (int nr = 0; nr < d; ++nr) {
      const Complex v = local(nr, nc);
      if (v != Complex(0, 0)) out(base + nr * stride, col) = v;
    }
  }
  return Operator(system, out);
}

namespace {

Matrix lowering_matrix(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

}  // namespace

Operator annihilation(const ModeSystem& system, const std::string& label) {
  return embed(system, label, lowering_matrix(system.dim_of(label)));
}

Operator creation(const ModeSystem& system, const std::string& label) {
  return embed(system, label,
               lowering_matrix(system.dim_of(label)).adjoint().eval());
}

Operator number(const ModeSystem& system, const std::string& label) {
  const int d = system.dim_of(label);
  Matrix n = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) n(i, i) = double(i);
  return embed(system, label, n);
}

Operator fock_projector(const ModeSystem& system, const std::string& label,
                        int n) {
  const int d = system.dim_of(label);
  if (n < 0 || n >= d) {
    throw std::invalid_argument("fock_projector: photon number " +
                                std::to_string(n) + " exceeds dimension of '" +
                                label + "'");
  }
  Matrix p = Matrix::Zero(d, d);
  p(n, n) = 1.0;
  return embed(system, label, p);
}

Operator displacement(const ModeSystem& system, const std::string& label,
                      Complex alpha) {
  const int d = system.dim_of(label);
  const Matrix a = lowering_matrix(d);
  const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  // gen is anti-Hermitian; exp(gen) = exp(-i (i gen)) with i*gen Hermitian.
  return embed(system, label, expm_unitary(Complex(0, 1) * gen, 1.0));
}

Operator parity_operator(const ModeSystem& system, const std::string& label) {
  const int d = system.dim_of(label);
  Matrix p = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n) p(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return embed(system, label, p);
}

Vector basis_ket(const ModeSystem& system,
                 const std::vector<int>& occupations) {
  Vector psi = Vector::Zero(system.total_dim());
  psi(system.basis_index(occupations)) = 1.0;
  return psi;
}

Vector superposition_ket(const ModeSystem& system,
                         const std::vector<std::vector<int>>& occs,
                         const std::vector<Complex>& amps) {
  if (occs.size() != amps.size()) {
    throw std::invalid_argument("superposition_ket: size mismatch");
  }
  Vector psi = Vector::Zero(system.total_dim());
  for (std::size_t i = 0; i < occs.size(); ++i) {
    psi(system.basis_index(occs[i])) += amps[i];
  }
  const double norm = psi.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("superposition_ket: zero state");
  }
  return psi / norm;
}

DensityMatrix basis_state(const ModeSystem& system,
                          const std::vector<int>& occupations) {
  return DensityMatrix::from_state(system, basis_ket(system, occupations));
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::string>& keep) {
  const ModeSystem& sys = rho.system();
  std::vector<std::size_t> keep_idx;
  std::vector<ModeSystem::Mode> kept_modes;
  for (const auto& m : sys.modes()) {
    if (std::find(keep.begin(), keep.end(), m.label) != keep.end()) {
      keep_idx.push_back(sys.mode_index(m.label));
      kept_modes.push_back(m);
    }
  }
  if (kept_modes.size() != keep.size()) {
    throw std::invalid_argument("partial_trace: unknown label in keep list");
  }
  ModeSystem reduced(kept_modes);
  const int n = sys.total_dim();
  Matrix out = Matrix::Zero(reduced.total_dim(), reduced.total_dim());

  std::vector<int> occ_row(keep_idx.size()), occ_col(keep_idx.size());
  for (int i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < keep_idx.size(); ++t) {
      occ_row[t] = sys.occupation(i, keep_idx[t]);
    }
    const int ri = reduced.basis_index(occ_row);
    for (int j = 0; j < n; ++j) {
      // Traced-out occupations must match between row and column.
      bool diag = true;
      for (std::size_t t = 0; t < sys.num_modes() && diag; ++t) {
        if (std::find(keep_idx.begin(), keep_idx.end(), t) != keep_idx.end()) {
          continue;
        }
        diag = sys.occupation(i, t) == sys.occupation(j, t);
      }
      if (!diag) continue;
      for (std::size_t t = 0; t < keep_idx.size(); ++t) {
        occ_col[t] = sys.occupation(j, keep_idx[t]);
      }
      out(ri, reduced.basis_index(occ_col)) += rho.matrix()(i, j);
    }
  }
  return DensityMatrix(reduced, out);
}

Matrix expm_unitary(const Matrix& hamiltonian, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("expm_unitary: eigendecomposition failed");
  }
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  Vector phases(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    phases(i) = std::exp(Complex(0, -vals(i) * t));
  }
  return vecs * phases.asDiagonal() * vecs.adjoint();
}

Matrix hermitian_function(const Matrix& h,
                          const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_function: eigendecomposition failed");
  }
  Eigen::VectorXd vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = f(vals(i));
  return es.eigenvectors() * vals.asDiagonal().toDenseMatrix().cast<Complex>() *
         es.eigenvectors().adjoint();
}

double PhaseSpaceGrid::integral() const {
  auto weights = [](const std::vector<double>& x) {
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double h = 0.5 * (x[i + 1] - x[i]);
      w[i] += h;
      w[i + 1] += h;
    }
    return w;
  };
  const auto wr = weights(re);
  const auto wi = weights(im);
  double sum = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i) {
    for (std::size_t j = 0; j < im.size(); ++j) {
      sum += wr[i] * wi[j] * values(i, j);
    }
  }
  return sum;
}

PhaseSpaceGrid wigner(const DensityMatrix& rho, const std::string& label,
                      const std::vector<double>& re_axis,
                      const std::vector<double>& im_axis) {
  if (re_axis.empty() || im_axis.empty()) {
    throw std::invalid_argument("wigner: empty grid");
  }
  auto check_monotone = [](const std::vector<double>& x) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      if (x[i + 1] <= x[i]) {
        throw std::invalid_argument("wigner: grid axis not increasing");
      }
    }
  };
  check_monotone(re_axis);
  check_monotone(im_axis);

  const DensityMatrix reduced = rho.system().num_modes() == 1
                                    ? rho
                                    : partial_trace(rho, {label});
  const int d = reduced.system().total_dim();

  // Displacements need headroom above the state's support; follow the
  // truncation-adequacy rule dim >= 4 |alpha|^2 + 10 per point, padded in
  // buckets so the embedded state and parity are reused.
  auto bucket_for = [&](double a2) {
    const int need = std::max(d, static_cast<int>(std::ceil(4.0 * a2 + 10)));
    return ((need + 7) / 8) * 8;
  };
  std::map<int, std::pair<ModeSystem, Matrix>> buckets;  // dim -> (sys, rho)
  auto padded_state = [&](int work) -> std::pair<ModeSystem, Matrix>& {
    auto it = buckets.find(work);
    if (it == buckets.end()) {
      ModeSystem padded({{"m", work}});
      Matrix rho_pad = Matrix::Zero(work, work);
      rho_pad.topLeftCorner(d, d) = reduced.matrix();
      it = buckets.emplace(work, std::make_pair(padded, rho_pad)).first;
    }
    return it->second;
  };

  PhaseSpaceGrid grid;
  grid.re = re_axis;
  grid.im = im_axis;
  grid.values.resize(re_axis.size(), im_axis.size());
  for (std::size_t i = 0; i < re_axis.size(); ++i) {
    for (std::size_t j = 0; j < im_axis.size(); ++j) {
      const Complex alpha(re_axis[i], im_axis[j]);
      auto& [padded, rho_pad] = padded_state(bucket_for(std::norm(alpha)));
      const Matrix disp = displacement(padded, "m", alpha).matrix();
      const Matrix par = parity_operator(padded, "m").matrix();
      const Complex w = (disp.adjoint() * rho_pad * disp * par).trace();
      grid.values(i, j) = (2.0 / M_PI) * w.real();
    }
  }
  return grid;
}

namespace {

// PSD square root with eigenvalues clipped at -1e-10 before the root.
Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -1e-10) vals(i) = 0.0;
    vals(i) = std::sqrt(std::max(0.0, vals(i)));
  }
  return es.eigenvectors() *
         vals.asDiagonal().toDenseMatrix().cast<Complex>() *
         es.eigenvectors().adjoint();
}

}  // namespace

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.system() != sigma.system()) {
    throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
  }
  const Matrix sqrt_sigma = psd_sqrt(sigma.matrix());
  const Matrix inner = sqrt_sigma * rho.matrix() * sqrt_sigma;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.adjoint()),
                                           Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    sum += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  }
  return std::min(1.0, sum * sum);
}

double fidelity_to_pure(const DensityMatrix& rho, const Vector& psi) {
  return std::real((psi.adjoint() * rho.matrix() * psi)(0, 0));
}

const std::array<const char*, 16>& PauliBars::labels() {
  static const std::array<const char*, 16> names = {
      "II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ",
      "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ"};
  return names;
}

double PauliBars::operator[](const std::string& label) const {
  const auto& names = labels();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (label == names[i]) return values[i];
  }
  throw std::invalid_argument("PauliBars: unknown label '" + label + "'");
}

PauliBars pauli_bars(const DensityMatrix& rho, std::pair<int, int> codewords_a,
                     std::pair<int, int> codewords_b) {
  const ModeSystem& sys = rho.system();
  if (sys.num_modes() != 2) {
    throw std::invalid_argument("pauli_bars: state must have exactly 2 modes");
  }
  const std::string la = sys.mode(0).label;
  const std::string lb = sys.mode(1).label;
  auto check = [&](std::pair<int, int> cw, const std::string& l) {
    const int d = sys.dim_of(l);
    if (cw.first < 0 || cw.second < 0 || cw.first >= d || cw.second >= d ||
        cw.first == cw.second) {
      throw std::invalid_argument("pauli_bars: invalid codewords for '" + l +
                                  "'");
    }
  };
  check(codewords_a, la);
  check(codewords_b, lb);

  auto logical = [&](const std::string& l, std::pair<int, int> cw) {
    const int d = sys.dim_of(l);
    std::array<Matrix, 4> p;
    for (auto& m : p) m = Matrix::Zero(d, d);
    p[0](cw.first, cw.first) = 1.0;  // I (on the code space)
    p[0](cw.second, cw.second) = 1.0;
    p[1](cw.first, cw.second) = 1.0;  // X
    p[1](cw.second, cw.first) = 1.0;
    p[2](cw.first, cw.second) = Complex(0, -1);  // Y
    p[2](cw.second, cw.first) = Complex(0, 1);
    p[3](cw.first, cw.first) = 1.0;  // Z
    p[3](cw.second, cw.second) = -1.0;
    return p;
  };
  const auto pa = logical(la, codewords_a);
  const auto pb = logical(lb, codewords_b);

  PauliBars bars;
  for (int i = 0; i < 4; ++i) {
    const Operator oa = embed(sys, la, pa[i]);
    for (int j = 0; j < 4; ++j) {
      const Operator ob = embed(sys, lb, pb[j]);
      bars.values[i * 4 + j] = std::real(rho.expectation(oa * ob));
    }
  }
  bars.leakage = rho.trace() - bars.values[0];
  return bars;
}

}  // namespace crosskerr
