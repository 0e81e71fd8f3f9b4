#include "bsid/sysmodel.hpp"

#include <cmath>
#include <string>

#include "bsid/linalg.hpp"
#include "bsid/random.hpp"

namespace bsid {

namespace {

constexpr double kStabilityLimit = 1.0 - 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("StateSpaceModel: " + what);
}

}  // namespace

void StateSpaceModel::validate() const {
  const Index n = A.rows();
  require(A.cols() == n, "A must be square");
  require(B.rows() == n, "B rows must equal state dimension");
  require(C.cols() == n, "C columns must equal state dimension");
  require(D.rows() == C.rows() && D.cols() == B.cols(), "D must be no x ni");
  require(K.rows() == n && K.cols() == C.rows(), "K must be nx x no");
  require(Sigma.rows() == C.rows() && Sigma.cols() == C.rows(), "Sigma must be no x no");
  require(A.allFinite() && B.allFinite() && C.allFinite() && D.allFinite() && K.allFinite() && Sigma.allFinite(),
          "non-finite entries");
  require(linalg::is_psd(Sigma), "Sigma must be symmetric positive semidefinite");
}

Matrix StateSpaceModel::predictor_b() const {
  Matrix out(nx(), ni() + no());
  out << B - K * D, K;
  return out;
}

double StateSpaceModel::predictor_spectral_radius() const { return linalg::spectral_radius(predictor_a()); }

bool StateSpaceModel::predictor_stable() const { return predictor_spectral_radius() < kStabilityLimit; }

StateSpaceModel make_model(Matrix a, Matrix b, Matrix c, Matrix d, Matrix k, Matrix sigma, bool allow_unstable) {
  StateSpaceModel m{std::move(a), std::move(b), std::move(c), std::move(d), std::move(k), std::move(sigma)};
  m.validate();
  if (!allow_unstable && !m.predictor_stable()) {
    throw ConfigError("StateSpaceModel: predictor A - K C is not stable (spectral radius " +
                      std::to_string(m.predictor_spectral_radius()) + ")");
  }
  return m;
}

void TimeSeries::validate() const {
  if (u.cols() != y.cols()) throw DataError("TimeSeries: u and y lengths differ");
  if (!u.allFinite() || !y.allFinite()) throw DataError("TimeSeries: non-finite samples");
}

TimeSeries TimeSeries::segment(Index start, Index len) const {
  if (start < 0 || len < 0 || start + len > length()) {
    throw DataError("TimeSeries::segment: [" + std::to_string(start) + ", " + std::to_string(start + len) +
                    ") outside series of length " + std::to_string(length()));
  }
  return TimeSeries{u.middleCols(start, len), y.middleCols(start, len)};
}

Simulation simulate(const StateSpaceModel& model, const Matrix& u, std::uint64_t noise_seed, const Vector& x0) {
  model.validate();
  if (u.rows() != model.ni()) throw ConfigError("simulate: input has wrong number of channels");
  if (!u.allFinite()) throw DataError("simulate: non-finite input");
  const Index T = u.cols();
  const Matrix root = linalg::sym_sqrt(model.Sigma);
  Rng rng(noise_seed);

  Simulation out;
  out.data.u = u;
  out.data.y.resize(model.no(), T);
  out.innovations = root * rng.normal_matrix(model.no(), T);
  out.states.resize(model.nx(), T + 1);
  Vector x = x0.size() == 0 ? Vector::Zero(model.nx()) : x0;
  if (x.size() != model.nx()) throw ConfigError("simulate: x0 has wrong dimension");
  out.states.col(0) = x;
  for (Index k = 0; k < T; ++k) {
    const auto e = out.innovations.col(k);
    out.data.y.col(k) = model.C * x + model.D * u.col(k) + e;
    x = model.A * x + model.B * u.col(k) + model.K * e;
    out.states.col(k + 1) = x;
  }
  return out;
}

Simulation simulate_white_input(const StateSpaceModel& model, Index length, std::uint64_t seed, Index burn_in) {
  Rng rng(mix_seed(seed, 0));
  const Matrix u = rng.normal_matrix(model.ni(), length + burn_in);
  Simulation full = simulate(model, u, mix_seed(seed, 1));
  Simulation out;
  out.data = full.data.segment(burn_in, length);
  out.innovations = full.innovations.middleCols(burn_in, length);
  out.states = full.states.middleCols(burn_in, length + 1);
  return out;
}

Matrix predict_one_step(const StateSpaceModel& model, const TimeSeries& data, const Vector& x0, bool allow_unstable) {
  model.validate();
  data.validate();
  if (data.ni() != model.ni() || data.no() != model.no()) throw ConfigError("predict_one_step: channel mismatch");
  if (!allow_unstable && !model.predictor_stable()) {
    throw NumericalError("predict_one_step: predictor A - K C is not stable");
  }
  const Matrix ak = model.predictor_a();
  const Matrix bk1 = model.B - model.K * model.D;
  Vector x = x0.size() == 0 ? Vector::Zero(model.nx()) : x0;
  if (x.size() != model.nx()) throw ConfigError("predict_one_step: x0 has wrong dimension");
  Matrix yhat(model.no(), data.length());
  for (Index k = 0; k < data.length(); ++k) {
    yhat.col(k) = model.C * x + model.D * data.u.col(k);
    x = ak * x + bk1 * data.u.col(k) + model.K * data.y.col(k);
  }
  return yhat;
}

Matrix extended_observability(const StateSpaceModel& model, Index f) {
  if (f < 1) throw ConfigError("extended_observability: f must be >= 1");
  const Index no = model.no();
  Matrix out(f * no, model.nx());
  Matrix block = model.C;
  for (Index m = 0; m < f; ++m) {
    out.middleRows(m * no, no) = block;
    block = block * model.A;
  }
  return out;
}

namespace {

// First block column [lead; C G; C A G; ...] of a causal Toeplitz operator.
Matrix impulse_column(const StateSpaceModel& model, const Matrix& lead, const Matrix& g, Index f) {
  const Index no = model.no();
  Matrix col(f * no, lead.cols());
  col.topRows(no) = lead;
  Matrix ca = model.C;
  for (Index m = 1; m < f; ++m) {
    col.middleRows(m * no, no) = ca * g;
    ca = ca * model.A;
  }
  return col;
}

Matrix lower_toeplitz_from_column(const Matrix& col, Index f) {
  const Index br = col.rows() / f;
  const Index bc = col.cols();
  Matrix out = Matrix::Zero(f * br, f * bc);
  for (Index c = 0; c < f; ++c) out.block(c * br, c * bc, (f - c) * br, bc) = col.topRows((f - c) * br);
  return out;
}

}  // namespace

Matrix toeplitz_hf(const StateSpaceModel& model, Index f) {
  if (f < 1) throw ConfigError("toeplitz_hf: f must be >= 1");
  return lower_toeplitz_from_column(impulse_column(model, model.D, model.B, f), f);
}

Matrix toeplitz_gf(const StateSpaceModel& model, Index f) {
  if (f < 1) throw ConfigError("toeplitz_gf: f must be >= 1");
  const Index no = model.no();
  const Matrix base = lower_toeplitz_from_column(impulse_column(model, Matrix::Identity(no, no), model.K, f), f);
  return base * linalg::kron_identity_left(f, linalg::sym_sqrt(model.Sigma));
}

Matrix MarkovBlocks::lp() const {
  Matrix out(lp1.rows(), lp1.cols() + lp2.cols());
  out << lp1, lp2;
  return out;
}

MarkovBlocks markov_hfp(const StateSpaceModel& model, Index f, Index p) {
  if (f < 1 || p < 1) throw ConfigError("markov_hfp: horizons must be >= 1");
  const Index nx = model.nx();
  const Index ni = model.ni();
  const Index no = model.no();
  const Matrix ak = model.predictor_a();
  const Matrix bk1 = model.B - model.K * model.D;
  const Matrix& bk2 = model.K;

  MarkovBlocks out;
  out.lp1.resize(nx, p * ni);
  out.lp2.resize(nx, p * no);
  // Column block m multiplies z[k-p+m]; it carries A_K^{p-1-m}.
  Matrix power = Matrix::Identity(nx, nx);
  for (Index m = p - 1; m >= 0; --m) {
    out.lp1.middleCols(m * ni, ni) = power * bk1;
    out.lp2.middleCols(m * no, no) = power * bk2;
    power = power * ak;
  }
  out.hfp = extended_observability(model, f) * out.lp();
  return out;
}

}  // namespace bsid
