#include "weylkit/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "weylkit/errors.hpp"
#include "weylkit/heisenberg.hpp"
#include "weylkit/linalg.hpp"
#include "weylkit/motion.hpp"
#include "weylkit/step_two.hpp"
#include "weylkit/uniqueness.hpp"

namespace weylkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Algebra {
  std::string name;
  StepTwoAlgebra alg;
};

std::string num(double x) { return format_double(x); }

double interior_max_error(const GridFunction& a, const GridFunction& b) {
  double worst = 0.0;
  const double edge = 0.75 * a.grid.half_width();
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    bool inside = true;
    for (double x : a.grid.point(i)) inside = inside && std::abs(x) <= edge;
    if (inside) worst = std::max(worst, std::abs(a.values(i) - b.values(i)));
  }
  return worst;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, std::vector<Algebra> algebras)
      : cfg_(cfg), dir_(cfg.output_dir), algebras_(std::move(algebras)) {
    report_.config = cfg;
  }

  RunOutcome execute() {
    const auto start = std::chrono::steady_clock::now();
    for (Suite s : concrete_suites()) {
      if (cfg_.suite != Suite::all && cfg_.suite != s) continue;
      for (Group g : suite_groups(s)) {
        if (cfg_.suite != Suite::all && g != cfg_.group) continue;
        const bool line_only = g == Group::motion || s == Suite::product_law ||
                               s == Suite::rank_profile || s == Suite::kernel_support ||
                               s == Suite::pocs;
        if (line_only && g != Group::step2 && cfg_.n != 1) {
          report_.skipped.push_back(to_string(s) + "/" + to_string(g) + ": needs n = 1");
          continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        suite_ = to_string(s);
        group_ = to_string(g);
        // Independent, reproducible stream per (seed, suite, group).
        std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed),
                          static_cast<std::uint32_t>(cfg_.seed >> 32), static_cast<std::uint32_t>(s),
                          static_cast<std::uint32_t>(g)};
        rng_.seed(seq);
        dispatch(s, g);
        timings_.emplace_back(suite_ + "/" + group_,
                              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
    }
    RunOutcome out;
    out.report = report_;
    out.timings = timings_;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }

 private:
  // Records one identity; exceptions become failures carrying their message.
  void check(const std::string& identity, const std::string& statement, double tol,
             const std::function<double()>& measure, const std::string& relation = "<=") {
    IdentityResult r{suite_, group_, identity, statement, relation, tol, kInf, false, ""};
    try {
      r.residual = measure();
      r.pass = std::isfinite(r.residual) &&
               (relation == "<=" ? r.residual <= tol : r.residual > tol);
    } catch (const std::exception& e) {
      r.pass = false;
      r.note = e.what();
    }
    report_.results.push_back(std::move(r));
  }

  void artifact(const std::string& name, const CsvTable& table) {
    table.write(dir_ / name);
    report_.artifacts.push_back(name);
  }

  void dispatch(Suite s, Group g) {
    switch (s) {
      case Suite::plancherel:
        if (g == Group::heisenberg) heisenberg_plancherel();
        if (g == Group::motion) motion_plancherel();
        if (g == Group::step2) step2_plancherel();
        break;
      case Suite::ortho:
        if (g == Group::heisenberg) heisenberg_ortho();
        if (g == Group::motion) motion_ortho();
        if (g == Group::step2) step2_ortho();
        break;
      case Suite::intertwine:
        motion_intertwine();
        break;
      case Suite::product_law:
        if (g == Group::heisenberg) heisenberg_product_law();
        if (g == Group::motion) motion_product_law();
        break;
      case Suite::symplectic:
        step2_symplectic();
        break;
      case Suite::inversion:
        step2_inversion();
        break;
      case Suite::rank_profile:
        rank_profile_suite();
        break;
      case Suite::kernel_support:
        kernel_support_suite();
        break;
      case Suite::pocs:
        pocs_suite();
        break;
      case Suite::all:
        break;
    }
  }

  HermiteBasis basis() const { return HermiteBasis(cfg_.n, cfg_.lambda, cfg_.degree_cap, cfg_.quad_size); }
  GridCn grid() const { return GridCn(cfg_.n, cfg_.L, cfg_.M); }
  double lambda_power() const { return std::pow(std::abs(cfg_.lambda), cfg_.n); }

  // ---------------------------------------------------------------- Heisenberg

  void heisenberg_plancherel() {
    const HermiteBasis b = basis();
    const GridCn g = grid();
    const int band = std::min(cfg_.n == 1 ? 6 : 2, cfg_.degree_cap - 1);
    const double c = plancherel_constant(b);
    std::vector<CMatrix> As;
    for (int t = 0; t < 5; ++t) As.push_back(random_band_matrix(b, band, rng_));
    check("plancherel", "||W(F)||_HS^2 = (2 pi)^n |lambda|^-n ||F||_2^2", 1e-5, [&] {
      double worst = 0.0;
      for (const auto& A : As) {
        const auto F = inverse_weyl(b, A, g);
        const double lhs = weyl_transform(b, F).matrix.squaredNorm();
        const double rhs = c * F.norm2();
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
      }
      return worst;
    });
    check("inverse round trip", "W(inverse_weyl(A)) = A for band-limited A", 1e-6, [&] {
      double worst = 0.0;
      for (const auto& A : As) worst = std::max(worst, relative_error(weyl_transform(b, inverse_weyl(b, A, g)).matrix, A));
      return worst;
    });
  }

  void heisenberg_ortho() {
    const HermiteBasis b = basis();
    const GridCn g = grid();
    check("hermite gram", "sum_q w_q phi_a(x_q) phi_b(x_q) = delta_ab", 1e-10, [&] {
      return (quadrature_gram(b) - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff();
    });
    check("hermite operator eigenvalues", "H_lambda phi_a = (2|a| + n)|lambda| phi_a, |a| <= N - 3", 1e-8, [&] {
      double worst = 0.0;
      for (int i = 0; i < b.size(); ++i) {
        if (b.total_degree(i) > cfg_.degree_cap - 3) continue;
        const double expect = (2.0 * b.total_degree(i) + cfg_.n) * std::abs(cfg_.lambda);
        worst = std::max(worst, std::abs(hermite_operator_check(b, b.multi_index(i)) - expect) / expect);
      }
      return worst;
    });
    check("special hermite orthonormality",
          "|lambda|^{n/2} phi_ab^lambda orthonormal in L^2(C^n), |a|, |b| <= 8 (n = 1), <= 1 (n = 2)", 1e-6, [&] {
            std::vector<int> idx;
            for (int i = 0; i < b.size(); ++i) {
              if (cfg_.n == 1 ? b.total_degree(i) <= 8 : b.total_degree(i) <= 1) idx.push_back(i);
            }
            const Eigen::Index P = static_cast<Eigen::Index>(g.size());
            const Eigen::Index K = static_cast<Eigen::Index>(idx.size() * idx.size());
            CMatrix V(P, K);
            const double scale = std::sqrt(lambda_power()) * std::pow(kTwoPi, -0.5 * cfg_.n);
            Eigen::Index col = 0;
            for (int a : idx)
              for (int c : idx) {
                CMatrix E = CMatrix::Zero(b.size(), b.size());
                E(c, a) = scale;
                V.col(col++) = matrix_coefficient(b, E, g).values;
              }
            const CMatrix G = g.cell_weight() * (V.adjoint() * V);
            return (G - CMatrix::Identity(K, K)).cwiseAbs().maxCoeff();
          });
    fourier_wigner_orthogonality_cn(b, g);
  }

  void fourier_wigner_orthogonality_cn(const HermiteBasis& b, const GridCn& g) {
    const int band = std::min(cfg_.n == 1 ? 6 : 1, cfg_.degree_cap - 1);
    const double c = plancherel_constant(b);
    check("fourier-wigner orthogonality",
          "<T(f1,g1), T(f2,g2)> = (2 pi)^n |lambda|^-n <f1,f2> conj<g1,g2>, 25 quadruples", 1e-5, [&] {
            double worst = 0.0;
            for (int t = 0; t < 25; ++t) {
              const auto f1 = random_coeffs(b, band, rng_), f2 = random_coeffs(b, band, rng_);
              const auto g1 = random_coeffs(b, band, rng_), g2 = random_coeffs(b, band, rng_);
              const cplx lhs = fourier_wigner(b, f1, g1, g).inner(fourier_wigner(b, f2, g2, g));
              const cplx rhs = c * f1.inner(f2) * std::conj(g1.inner(g2));
              worst = std::max(worst, std::abs(lhs - rhs) / (c * f1.norm() * f2.norm() * g1.norm() * g2.norm()));
            }
            return worst;
          });
  }

  void heisenberg_product_law() {
    const HermiteBasis b(1, cfg_.lambda, std::min(cfg_.degree_cap, 8));
    const GridCn g(1, 14.0 / std::sqrt(std::abs(cfg_.lambda)), std::min(cfg_.M, 64));
    const int band = std::min(4, b.degree_cap() - 1);
    double prod = 0.0, adj = 0.0;
    std::string err;
    try {
      for (int t = 0; t < 50; ++t) {
        const auto F = inverse_weyl(b, random_band_matrix(b, band, rng_), g);
        const auto H = inverse_weyl(b, random_band_matrix(b, band, rng_), g);
        const CMatrix WF = weyl_transform(b, F).matrix, WH = weyl_transform(b, H).matrix;
        prod = std::max(prod, relative_error(weyl_transform(b, twisted_convolution(cfg_.lambda, F, H)).matrix, WF * WH));
        adj = std::max(adj, relative_error(weyl_transform(b, F.star()).matrix, WF.adjoint()));
      }
    } catch (const std::exception& e) {
      err = e.what();
    }
    auto value = [&](double v) {
      if (!err.empty()) throw std::runtime_error(err);
      return v;
    };
    check("product law", "W(F x_lambda H) = W(F) W(H), 50 band-limited pairs", 1e-5, [&] { return value(prod); });
    check("adjoint law", "W(F*) = W(F)^*, 50 band-limited functions", 1e-5, [&] { return value(adj); });
  }

  void rank_profile_suite() {
    const GridCn g = grid();
    const double R = 0.25 * cfg_.L;
    const auto bump = GridFunction::sample(g, [R](std::span<const double> z) {
      const double r2 = (z[0] * z[0] + z[1] * z[1]) / (R * R);
      return cplx(r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0);
    });
    CsvTable csv({"N", "index", "sigma"});
    std::vector<int> ranks;
    double recon = 0.0;
    std::string err;
    try {
      for (int N : {8, 16, 24, 32}) {
        const HermiteBasis b(1, cfg_.lambda, N);
        const auto rp = rank_profile(weyl_transform(b, bump), cfg_.epsilon);
        ranks.push_back(rp.numerical_rank);
        recon = std::max(recon, rp.reconstruction_residual / rp.singular_values[0]);
        for (std::size_t i = 0; i < rp.singular_values.size(); ++i)
          csv.add_row({std::to_string(N), std::to_string(i), num(rp.singular_values[i])});
      }
      artifact("rank_profile.csv", csv);
    } catch (const std::exception& e) {
      err = e.what();
    }
    check("rank sweep has no plateau",
          "numerical rank of W(bump) nondecreasing over N = 8, 16, 24, 32 (residual: largest drop)", 0.0, [&] {
            if (!err.empty()) throw std::runtime_error(err);
            int drop = 0;
            for (std::size_t i = 1; i < ranks.size(); ++i) drop = std::max(drop, ranks[i - 1] - ranks[i]);
            return static_cast<double>(drop);
          });
    check("svd reconstruction", "||W - U S V^H|| <= 1e-10 sigma_1", 1e-10, [&] {
      if (!err.empty()) throw std::runtime_error(err);
      return recon;
    });
    check("rank one of conj(phi_ab)", "numerical rank of W(conj phi_{2,5}) at eps = 1e-6 is 1 (residual: |rank - 1|)",
          0.0, [&] {
            const HermiteBasis b(1, cfg_.lambda, std::max(cfg_.degree_cap, 6));
            CMatrix K = CMatrix::Zero(b.size(), b.size());
            K(5, 2) = 1.0;
            const auto F = matrix_coefficient(b, K, g).conj();
            return std::abs(rank_profile(weyl_transform(b, F), 1e-6).numerical_rank - 1.0);
          });
  }

  void kernel_support_suite() {
    const HermiteBasis b(1, cfg_.lambda, cfg_.degree_cap);
    const double s = std::abs(cfg_.lambda), rs = std::sqrt(s);
    const double ymax = 20.0 / rs;
    const int ny = 1000;
    const double dy = ymax / ny;
    std::vector<double> ys, xi;
    for (int i = 0; i <= ny; ++i) ys.push_back(i * dy);
    // xi on a dy/2 lattice so the peak -y/2 of the Gaussian product is sampled.
    const int kx = static_cast<int>(std::ceil((0.5 * ymax + 8.0 / rs) / (0.5 * dy)));
    for (int k = -kx; k <= static_cast<int>(std::ceil(8.0 / rs / (0.5 * dy))); ++k) xi.push_back(0.5 * dy * k);

    const std::vector<CoeffVector> g0 = {CoeffVector::unit(b, {0})};
    const std::vector<cplx> one = {1.0};
    const double tol = 1e-8;
    KernelSupport gauss, rand;
    std::string err;
    try {
      gauss = kernel_support(b, g0, g0, one, ys, xi, tol);
      std::vector<CoeffVector> chi, phi;
      const int band = std::min(5, cfg_.degree_cap - 1);
      for (int j = 0; j < 3; ++j) {
        chi.push_back(random_coeffs(b, band, rng_));
        phi.push_back(random_coeffs(b, band, rng_));
      }
      rand = kernel_support(b, chi, phi, {1.0, -0.3, cplx(0.2, 0.7)}, ys, xi, tol);
      CsvTable csv({"y", "gaussian_max_abs", "random_max_abs"});
      for (std::size_t i = 0; i < ys.size(); ++i) csv.add_row({num(gauss.y[i]), num(gauss.max_abs[i]), num(rand.max_abs[i])});
      artifact("kernel_support.csv", csv);
    } catch (const std::exception& e) {
      err = e.what();
    }
    auto need = [&] {
      if (!err.empty()) throw std::runtime_error(err);
    };
    check("gaussian kernel support radius",
          "r_hat(1e-8) for K_y = phi_0(xi + y) phi_0(xi) matches the closed form to the y spacing", dy * (1 + 1e-9), [&] {
            need();
            const double exact = 2.0 * std::sqrt(std::log(std::sqrt(s) / (tol * std::sqrt(std::numbers::pi))) / s);
            return std::abs(gauss.r_hat - exact);
          });
    check("hermite kernels have no finite support",
          "min over sampled |y| >= r of max_xi |K_y| > 0 for every r (residual: smallest such value)", 0.0, [&] {
            need();
            double m = kInf;
            for (double v : rand.max_abs) m = std::min(m, v);
            return m;
          }, ">");
    check("kernel integral at y = 0", "int K_0 = sum b_j for orthonormal chi = phi", 1e-12, [&] {
      const std::vector<CoeffVector> o = {CoeffVector::unit(b, {0}), CoeffVector::unit(b, {1}),
                                          CoeffVector::unit(b, {std::min(4, cfg_.degree_cap - 1)})};
      const std::vector<cplx> bb = {1.0, cplx(0.0, 2.0), -0.5};
      const CVector K0 = kernel_Ky(b, o, o, bb, 0.0);
      const QuadratureRule rule = b.scaled_rule(0);
      cplx acc = 0.0;
      for (int q = 0; q < K0.size(); ++q) acc += rule.weights[q] * K0(q);
      return std::abs(acc - (bb[0] + bb[1] + bb[2]));
    });

    // Tail mass: Gaussian closed form and reconstructed finite-rank tau.
    const GridCn g = grid();
    std::vector<double> radii;
    for (int k = 1; k <= 16; ++k) radii.push_back(0.8 * cfg_.L * k / 16.0);
    const auto G = GridFunction::sample(g, [s](std::span<const double> z) {
      return cplx(std::exp(-s * (z[0] * z[0] + z[1] * z[1]) / 4.0));
    });
    std::vector<double> gt, go;
    std::vector<std::vector<double>> taus;
    double spectral_residual = 0.0;
    err.clear();
    try {
      for (double R : radii) {
        gt.push_back(tail_mass(G, R));
        go.push_back(kTwoPi / s * std::exp(-s * R * R / 2.0));
      }
      for (int rank = 1; rank <= 3; ++rank) {
        CMatrix A = CMatrix::Zero(b.size(), b.size());
        for (int j = 0; j < rank; ++j) {
          const auto f = random_coeffs(b, std::min(4, cfg_.degree_cap - 1), rng_);
          A += f.coeffs * f.coeffs.adjoint();
        }
        const auto dec = spectral_to_wigner(WeylMatrix{A, {cfg_.lambda}, std::nullopt, 0.0}, b);
        spectral_residual = std::max(spectral_residual, dec.residual);
        const auto tau = reconstruct_tau(b, dec, g);
        std::vector<double> t;
        for (double R : radii) t.push_back(tail_mass(tau, R));
        taus.push_back(t);
      }
      CsvTable csv({"radius", "gaussian_tail", "gaussian_oracle", "tau_rank1", "tau_rank2", "tau_rank3"});
      for (std::size_t i = 0; i < radii.size(); ++i)
        csv.add_row({num(radii[i]), num(gt[i]), num(go[i]), num(taus[0][i]), num(taus[1][i]), num(taus[2][i])});
      artifact("tail_mass.csv", csv);
    } catch (const std::exception& e) {
      err = e.what();
    }
    check("gaussian tail mass", "tail_mass(e^{-|lambda||z|^2/4}, R) = (2 pi/|lambda|) e^{-|lambda| R^2/2}, R <= 0.8 L",
          1e-6, [&] {
            need();
            double worst = 0.0;
            for (std::size_t i = 0; i < gt.size(); ++i) worst = std::max(worst, std::abs(gt[i] - go[i]));
            return worst;
          });
    check("finite-rank tau is not compactly supported",
          "tail_mass(tau, R) > 0 for R <= 0.8 L, tau of rank 1, 2, 3 (residual: smallest tail)", 0.0, [&] {
            need();
            double m = kInf;
            for (const auto& t : taus)
              for (double v : t) m = std::min(m, v);
            return m;
          }, ">");
    check("spectral decomposition", "tau_hat = sum a_j f_j f_j^H", 1e-10, [&] {
      need();
      return spectral_residual;
    });
    check("tau reconstruction", "sum_j T(h_j, h_j) = conj(h* x h) for tau_hat = W(h)^* W(h)", 1e-4, [&] {
      const HermiteBasis bb(1, cfg_.lambda, std::min(cfg_.degree_cap, 8));
      const GridCn gc(1, 14.0 / rs, 64);
      const auto h = inverse_weyl(bb, random_band_matrix(bb, std::min(3, bb.degree_cap() - 1), rng_), gc);
      const CMatrix Wh = weyl_transform(bb, h).matrix;
      const auto dec = spectral_to_wigner(WeylMatrix{Wh.adjoint() * Wh, {cfg_.lambda}, std::nullopt, 0.0}, bb);
      const auto tau = reconstruct_tau(bb, dec, gc);
      const auto expect = twisted_convolution(cfg_.lambda, h.star(), h).conj();
      return std::sqrt(GridFunction(gc, tau.values - expect.values).norm2() / expect.norm2());
    });
  }

  void pocs_suite() {
    const PocsReference ref = pocs_reference(cfg_.seed);
    PocsResult res{{}, GridFunction(ref.grid)};
    std::string err;
    try {
      res = pocs_explorer(ref.basis, ref.mask, ref.F0, cfg_.rank_cap, cfg_.iterations);
      CsvTable csv({"iteration", "norm"});
      for (std::size_t k = 0; k < res.norms.size(); ++k) csv.add_row({std::to_string(k), num(res.norms[k])});
      artifact("pocs_trajectory.csv", csv);
    } catch (const std::exception& e) {
      err = e.what();
    }
    check("pocs regression bound",
          "final / initial norm of the reference alternating-projection run", kPocsReferenceBound, [&] {
            if (!err.empty()) throw std::runtime_error(err);
            return res.norms.back() / res.norms.front();
          });
    check("support projection is a contraction", "||mask F|| <= ||F|| (residual: excess)", 0.0, [&] {
      const auto F = inverse_weyl(ref.basis, random_band_matrix(ref.basis, 5, rng_), ref.grid);
      GridFunction m = F;
      m.values = F.values.cwiseProduct(ref.mask.cast<cplx>());
      return std::max(0.0, std::sqrt(m.norm2()) - std::sqrt(F.norm2()));
    });
  }

  // -------------------------------------------------------------------- motion

  // Motion checks use random data of degree <= 6, so a degree cap of 12 suffices.
  HermiteBasis motion_basis() const {
    const int N = std::min(cfg_.degree_cap, 12);
    return HermiteBasis(1, cfg_.lambda, N, cfg_.quad_size == 0 ? 0 : std::max(cfg_.quad_size, 2 * N + 8));
  }

  GridGx motion_grid() const { return GridGx(GridCn(1, cfg_.L, std::min(cfg_.M, 64)), cfg_.T, cfg_.M_char); }

  std::vector<CMatrix> random_family(const HermiteBasis& b, int cap, int active, int band) {
    std::vector<CMatrix> Ws;
    for (int m = -cap; m <= cap; ++m)
      Ws.push_back(std::abs(m) <= active ? random_band_matrix(b, band, rng_) : CMatrix::Zero(b.size(), b.size()));
    return Ws;
  }

  void motion_plancherel() {
    const HermiteBasis b = motion_basis();
    check("motion plancherel",
          "sum_{|m| <= M_char} ||W_m(F)||_HS^2 = (2 pi / |lambda|) ||F||^2, Haar mass 1 on U(1)", 1e-4, [&] {
            const GridGx g = motion_grid();
            const int cap = cfg_.M_char;
            const int band = std::min(6, b.degree_cap() - 1);
            // Active characters and band keep the theta content below T / 2.
            const int active = std::min(cap, std::max(0, cfg_.T / 2 - band - 2));
            const auto F = inverse_motion_weyl(b, random_family(b, cap, std::min(active, 4), band), g);
            double total = 0.0;
            for (int m = -cap; m <= cap; ++m) total += motion_weyl(b, CharacterIndex(m, cap), F).matrix.squaredNorm();
            const double expect = kTwoPi / std::abs(cfg_.lambda) * F.norm2();
            return std::abs(total - expect) / expect;
          });
  }

  void motion_ortho() {
    const HermiteBasis b = motion_basis();
    check("motion fourier-wigner orthogonality",
          "<V_m(f1,g1), V_m(f2,g2)> = (2 pi / |lambda|) <f1,f2> conj<g1,g2>, 25 quadruples", 1e-5, [&] {
            const GridGx g = motion_grid();
            const int band = std::min(5, b.degree_cap() - 1);
            const double c = kTwoPi / std::abs(cfg_.lambda);
            std::uniform_int_distribution<int> pick(-cfg_.M_char, cfg_.M_char);
            double worst = 0.0;
            for (int t = 0; t < 25; ++t) {
              const CharacterIndex m(pick(rng_), cfg_.M_char);
              const auto f1 = random_coeffs(b, band, rng_), f2 = random_coeffs(b, band, rng_);
              const auto g1 = random_coeffs(b, band, rng_), g2 = random_coeffs(b, band, rng_);
              const cplx lhs = fourier_wigner_motion(b, m, f1, g1, g).inner(fourier_wigner_motion(b, m, f2, g2, g));
              const cplx rhs = c * f1.inner(f2) * std::conj(g1.inner(g2));
              worst = std::max(worst, std::abs(lhs - rhs) / (c * f1.norm() * f2.norm() * g1.norm() * g2.norm()));
            }
            return worst;
          });
  }

  void motion_intertwine() {
    const HermiteBasis b(1, cfg_.lambda, cfg_.degree_cap, cfg_.quad_size);
    const int sign = metaplectic_sign(cfg_.lambda);
    const double thetas[] = {0.3, 1.1, 2.0, 3.7, 5.5};
    const double zs[5][2] = {{0.0, 0.0}, {0.7, -0.4}, {-1.2, 0.9}, {2.0, 1.5}, {-0.5, -2.5}};
    auto worst = [&](int sg) {
      double r = 0.0;
      for (double th : thetas)
        for (const auto& z : zs) r = std::max(r, intertwining_residual(b, th, z, sg));
      return r;
    };
    check("intertwining", "pi(e^{i theta} z) = mu(theta) pi(z) mu(theta)^*, mu(theta) phi_k = e^{i sgn(lambda) k theta} phi_k",
          1e-6, [&] { return worst(sign); });
    check("intertwining, opposite phase sign", "the phase e^{-i sgn(lambda) k theta} does not intertwine",
          1e-2, [&] { return worst(-sign); }, ">");
    report_.results.back().note = "convention that passed: mu(theta) phi_k = e^{i s k theta}, s = sgn(lambda) = " +
                                  std::to_string(sign);
  }

  void motion_product_law() {
    const HermiteBasis b(1, cfg_.lambda, std::min(cfg_.degree_cap, 6), cfg_.quad_size);
    check("motion product law", "W_m(F x H) = W_m(F) W_m(H) on C x U(1), |m| <= 2, 2 pairs", 1e-5, [&] {
      const int cap = std::min(cfg_.M_char, 2);
      const GridGx g(GridCn(1, cfg_.L, std::min(cfg_.M, 48)), 2 * cap + 4, cap);
      const int band = std::min(3, b.degree_cap() - 1);
      double worst = 0.0;
      for (int t = 0; t < 2; ++t) {
        const auto F = inverse_motion_weyl(b, random_family(b, cap, cap, band), g);
        const auto H = inverse_motion_weyl(b, random_family(b, cap, cap, band), g);
        const auto C = twisted_convolution_gx(b, F, H);
        for (int m = -cap; m <= cap; ++m) {
          const CharacterIndex c(m, cap);
          worst = std::max(worst, relative_error(motion_weyl(b, c, C).matrix,
                                                 motion_weyl(b, c, F).matrix * motion_weyl(b, c, H).matrix));
        }
      }
      return worst;
    });
  }

  // ------------------------------------------------------------------ step two

  std::vector<Eigen::VectorXd> omegas(const StepTwoAlgebra& alg) {
    std::vector<Eigen::VectorXd> out;
    if (!cfg_.omega.empty()) {
      out.push_back(Eigen::Map<const Eigen::VectorXd>(cfg_.omega.data(), static_cast<Eigen::Index>(cfg_.omega.size())));
      return out;
    }
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd w(alg.k());
      for (int l = 0; l < alg.k(); ++l) w(l) = nd(rng_);
      out.push_back(scale(rng_) * w.normalized());
    }
    return out;
  }

  struct Frame {
    SymplecticDecomp d;
    HermiteBasis basis;
    GridCn grid;
    int band;
  };

  Frame frame(const StepTwoAlgebra& alg, const Eigen::VectorXd& w) const {
    auto d = symplectic_decompose(alg, w);
    if (!d.metivier()) throw UnsupportedError("omega has a nontrivial radical; no pi_omega");
    const int n = d.pairs();
    if (n > 2) throw UnsupportedError("more than two symplectic pairs");
    const int N = std::min(cfg_.degree_cap, n == 1 ? 8 : 4);
    HermiteBasis b = omega_basis(d, N);
    const double width = (n == 1 ? 14.0 : 12.0) / std::sqrt(d.d.back());
    GridCn g(n, width, n == 1 ? 64 : 40);
    return {std::move(d), std::move(b), g, std::min(n == 1 ? 4 : 3, N - 1)};
  }

  void step2_plancherel() {
    for (const auto& [name, alg] : algebras_) {
      const auto ws = omegas(alg);
      if (!symplectic_decompose(alg, ws.front()).metivier()) continue;
      check("step-two plancherel [" + name + "]",
            "p(omega) ||W_omega(h)||_HS^2 = (2 pi)^n ||h||^2 over the omega sweep", 1e-4, [&] {
              double worst = 0.0;
              for (const auto& w : ws) {
                const Frame f = frame(alg, w);
                const auto h = inverse_weyl(f.basis, random_band_matrix(f.basis, f.band, rng_), f.grid);
                const double lhs = f.d.p_omega * weyl_omega(f.d, f.basis, h).matrix.squaredNorm();
                const double rhs = std::pow(kTwoPi, f.d.pairs()) * h.norm2();
                worst = std::max(worst, std::abs(lhs - rhs) / rhs);
              }
              return worst;
            });
      check("step-two adjoint [" + name + "]", "W_omega(h*) = W_omega(h)^*", 1e-8, [&] {
        const Frame f = frame(alg, ws.front());
        const auto h = inverse_weyl(f.basis, random_band_matrix(f.basis, f.band, rng_), f.grid);
        const CMatrix W = weyl_omega(f.d, f.basis, h).matrix;
        return relative_error(weyl_omega(f.d, f.basis, h.star()).matrix, W.adjoint());
      });
      if (alg.m() == 2 && alg.k() == 1) {
        check("cross-module weyl [" + name + "]",
              "W_omega(h) equals the Heisenberg Weyl transform at lambda = -d_1 entrywise", 1e-10, [&] {
                double worst = 0.0;
                for (const auto& w : ws) {
                  const Frame f = frame(alg, w);
                  const auto h = inverse_weyl(f.basis, random_band_matrix(f.basis, f.band, rng_), f.grid);
                  const HermiteBasis hb(1, -f.d.d[0], f.basis.degree_cap());
                  worst = std::max(worst, (weyl_omega(f.d, f.basis, h).matrix - weyl_transform(hb, h).matrix)
                                              .cwiseAbs()
                                              .maxCoeff());
                }
                return worst;
              });
        check("cross-module representation [" + name + "]",
              "pi_omega(x, y) equals the Schrodinger matrix at lambda = d_1, point (-x, y)", 1e-10, [&] {
                double worst = 0.0;
                for (const auto& w : ws) {
                  const Frame f = frame(alg, w);
                  const HermiteBasis hb(1, f.d.d[0], f.basis.degree_cap());
                  const double t0[] = {0.0};
                  for (auto [x, y] : {std::pair{0.7, -0.2}, std::pair{-1.5, 1.1}, std::pair{2.0, 0.4}}) {
                    const double px[] = {x}, py[] = {y}, zr[] = {-x, y};
                    const CMatrix S = schrodinger_matrix(hb, zr).matrix;
                    for (int a = 0; a < f.basis.size(); ++a) {
                      const CVector col =
                          pi_omega_action(f.d, f.basis, px, py, t0, CoeffVector::unit(f.basis, {a})).coeffs;
                      worst = std::max(worst, (col - S.col(a)).cwiseAbs().maxCoeff());
                    }
                  }
                }
                return worst;
              });
      }
    }
  }

  void step2_ortho() {
    for (const auto& [name, alg] : algebras_) {
      const auto ws = omegas(alg);
      if (!symplectic_decompose(alg, ws.front()).metivier()) continue;
      check("step-two fourier-wigner orthogonality [" + name + "]",
            "<V(f1,g1), V(f2,g2)> = c(omega) <f1,f2> conj<g1,g2>, c = (2 pi)^n / p(omega), 25 quadruples", 1e-5, [&] {
              const Frame f = frame(alg, ws.front());
              const int n = f.d.pairs();
              // Narrower band and grid for two pairs keep the M^4 evaluations small.
              const GridCn g = n == 1 ? f.grid : GridCn(2, 8.0 / std::sqrt(f.d.d.back()), 24);
              const int band = n == 1 ? f.band : 2;
              const double c = std::pow(kTwoPi, n) / f.d.p_omega;
              double worst = 0.0;
              for (int t = 0; t < 25; ++t) {
                const auto f1 = random_coeffs(f.basis, band, rng_), f2 = random_coeffs(f.basis, band, rng_);
                const auto g1 = random_coeffs(f.basis, band, rng_), g2 = random_coeffs(f.basis, band, rng_);
                const cplx lhs = fourier_wigner(f.basis, f1, g1, g).inner(fourier_wigner(f.basis, f2, g2, g));
                const cplx rhs = c * f1.inner(f2) * std::conj(g1.inner(g2));
                worst = std::max(worst, std::abs(lhs - rhs) / (c * f1.norm() * f2.norm() * g1.norm() * g2.norm()));
              }
              return worst;
            });
    }
  }

  void step2_symplectic() {
    std::vector<Algebra> list = algebras_;
    if (cfg_.algebra_file.empty()) list.push_back({"radical", radical_algebra()});
    for (const auto& [name, alg] : list) {
      const auto ws = omegas(alg);
      std::vector<SymplecticDecomp> ds;
      std::string err;
      try {
        for (std::size_t i = 0; i < ws.size(); ++i) {
          ds.push_back(symplectic_decompose(alg, ws[i]));
          const auto& d = ds.back();
          CsvTable csv({"quantity", "value"});
          for (int j = 0; j < d.pairs(); ++j) csv.add_row({"d_" + std::to_string(j + 1), num(d.d[j])});
          csv.add_row({"p_omega", num(d.p_omega)});
          csv.add_row({"radical_dim", std::to_string(d.radical_dim)});
          csv.add_row({"tie", d.tie ? "1" : "0"});
          csv.add_row({"pairing_residual", num(d.pairing_residual())});
          artifact("symplectic_" + name + "_" + std::to_string(i) + ".csv", csv);
        }
      } catch (const std::exception& e) {
        err = e.what();
      }
      auto need = [&] {
        if (!err.empty()) throw std::runtime_error(err);
      };
      check("pairing [" + name + "]", "omega([X_i, Y_j]) = delta_ij d_i, omega([X_i, X_j]) = omega([Y_i, Y_j]) = 0", 1e-10,
            [&] {
              need();
              double r = 0.0;
              for (const auto& d : ds) r = std::max(r, d.pairing_residual());
              return r;
            });
      check("homogeneity [" + name + "]", "d_i(s omega) = |s| d_i(omega), s = -2.5", 1e-10, [&] {
        need();
        double r = 0.0;
        for (std::size_t i = 0; i < ws.size(); ++i) {
          const auto ds2 = symplectic_decompose(alg, -2.5 * ws[i]);
          if (ds2.pairs() != ds[i].pairs()) return kInf;
          for (int j = 0; j < ds[i].pairs(); ++j) r = std::max(r, std::abs(ds2.d[j] - 2.5 * ds[i].d[j]) / (2.5 * ds[i].d[j]));
        }
        return r;
      });
      const int expected_radical = name == "radical" ? 2 : 0;
      check("radical dimension [" + name + "]",
            std::string("radical_dim = ") + std::to_string(expected_radical) +
                (expected_radical == 0 ? " at every sampled omega (Metivier)" : " (not Metivier)") +
                " (residual: largest deviation)",
            0.0, [&] {
              need();
              int r = 0;
              for (const auto& d : ds) r = std::max(r, std::abs(d.radical_dim - expected_radical));
              return static_cast<double>(r);
            });
      check("group law associativity [" + name + "]", "((a b) c) = (a (b c)) in exponential coordinates, 20 triples", 1e-12,
            [&] {
              std::normal_distribution<double> nd;
              auto element = [&] {
                StepTwoElement e{Eigen::VectorXd(alg.m()), Eigen::VectorXd(alg.k())};
                for (int i = 0; i < alg.m(); ++i) e.V(i) = nd(rng_);
                for (int i = 0; i < alg.k(); ++i) e.Z(i) = nd(rng_);
                return e;
              };
              double r = 0.0;
              for (int t = 0; t < 20; ++t) {
                const auto a = element(), b = element(), c = element();
                const auto l = group_multiply(alg, group_multiply(alg, a, b), c);
                const auto rr = group_multiply(alg, a, group_multiply(alg, b, c));
                r = std::max({r, (l.V - rr.V).cwiseAbs().maxCoeff(), (l.Z - rr.Z).cwiseAbs().maxCoeff()});
              }
              return r;
            });
    }
  }

  void step2_inversion() {
    for (const auto& [name, alg] : algebras_) {
      const auto ws = omegas(alg);
      if (!symplectic_decompose(alg, ws.front()).metivier()) continue;
      const std::size_t count = std::min<std::size_t>(2, ws.size());
      double tail = 0.0;
      check("trace inversion [" + name + "]",
            "(2 pi)^-n p(omega) tr(pi_omega(v)^* W_omega(h)) = h(v) on interior points, relative to ||h||_inf", 1e-4,
            [&] {
              double worst = 0.0;
              for (std::size_t i = 0; i < count; ++i) {
                const Frame f = frame(alg, ws[i]);
                const auto h = inverse_weyl(f.basis, random_band_matrix(f.basis, f.band, rng_), f.grid);
                const auto Fhat = weyl_omega(f.d, f.basis, h);
                tail = std::max(tail, inversion_tail(f.basis, Fhat));
                const auto back = inversion_on_grid(f.d, f.basis, Fhat, f.grid);
                worst = std::max(worst, interior_max_error(back, h) / h.values.cwiseAbs().maxCoeff());
              }
              return worst;
            });
      report_.results.back().note = "largest top-degree share of ||W||_HS^2: " + num(tail);
      if (alg.m() == 2 && alg.k() == 1) {
        check("trace inversion of a special hermite function [" + name + "]",
              "round trip of conj(phi_{1,3}) through W_omega and the trace formula", 1e-5, [&] {
                const Frame f = frame(alg, ws.front());
                CMatrix K = CMatrix::Zero(f.basis.size(), f.basis.size());
                K(3, 1) = 1.0 / std::sqrt(kTwoPi);
                const auto h = matrix_coefficient(f.basis, K, f.grid).conj();
                const auto W = weyl_omega(f.d, f.basis, h);
                double r = 0.0;
                for (std::size_t i = 0; i < f.grid.size(); i += 37)
                  r = std::max(r, std::abs(inversion(f.d, f.basis, W, f.grid.point(i)) - h.values(i)));
                return r;
              });
      }
    }
  }

  RunConfig cfg_;
  std::filesystem::path dir_;
  std::vector<Algebra> algebras_;
  Report report_;
  std::vector<std::pair<std::string, double>> timings_;
  std::mt19937_64 rng_;
  std::string suite_, group_;
};

std::vector<Algebra> load_algebras(const RunConfig& cfg) {
  std::vector<Algebra> out;
  if (cfg.algebra_file.empty()) {
    out.push_back({"heisenberg", heisenberg_algebra()});
    out.push_back({"quaternionic", quaternionic_h_type_algebra()});
    return out;
  }
  try {
    out.push_back({std::filesystem::path(cfg.algebra_file).stem().string(), StepTwoAlgebra::load(cfg.algebra_file)});
  } catch (const std::exception& e) {
    throw ConfigError(std::string("algebra_file: ") + e.what());
  }
  return out;
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
  validate_config(cfg);
  const auto algebras = load_algebras(cfg);
  if (!cfg.omega.empty())
    for (const auto& a : algebras)
      if (static_cast<int>(cfg.omega.size()) != a.alg.k())
        throw ConfigError("omega: " + std::to_string(cfg.omega.size()) + " components given, algebra '" + a.name +
                          "' has k = " + std::to_string(a.alg.k()));
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  {
    std::ofstream probe(std::filesystem::path(cfg.output_dir) / "report.json", std::ios::binary);
    if (ec || !probe) throw ConfigError("output_dir: cannot write to '" + cfg.output_dir + "'");
  }

  Runner runner(cfg, algebras);
  RunOutcome out = runner.execute();
  const std::filesystem::path dir(cfg.output_dir);
  {
    std::ofstream f(dir / "report.json", std::ios::binary);
    f << report_json(out.report).dump(2) << '\n';
  }
  {
    nlohmann::json t;
    t["wall_seconds"] = out.wall_seconds;
    for (const auto& [k, v] : out.timings) t["suites"][k] = v;
    std::ofstream f(dir / "timing.json", std::ios::binary);
    f << t.dump(2) << '\n';
  }
  return out;
}

int exit_status(const Report& r) { return r.all_pass() ? 0 : 1; }

std::string list_suites_text() {
  std::ostringstream s;
  for (Suite x : concrete_suites()) {
    s << to_string(x) << ':';
    for (Group g : suite_groups(x)) s << ' ' << to_string(g);
    s << '\n';
  }
  s << "all: every suite above for every group\n";
  return s.str();
}

std::string fixtures_text() {
  std::ostringstream s;
  for (const auto& f : shipped_fixtures()) {
    s << "== " << f.file_name << " (" << f.name << ") ==\n" << f.make().serialize();
  }
  return s.str();
}

}  // namespace weylkit
