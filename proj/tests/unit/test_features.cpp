#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "honeyboost/features.hpp"
#include "honeyboost/pca.hpp"
#include "oracles.hpp"
#include "worked_example.hpp"

using namespace honeyboost;
using P2 = std::array<double, 2>;

TEST_CASE("fit_line worked examples") {
  SUBCASE("collinear") {
    const std::vector<P2> pts{{0, 0}, {1, 1}, {2, 2}};
    const auto f = fit_line(pts);
    CHECK(f.slope == doctest::Approx(1.0));
    CHECK(f.intercept == doctest::Approx(0.0));
    CHECK(f.sse == doctest::Approx(0.0));
  }
  SUBCASE("tent") {
    const std::vector<P2> pts{{0, 0}, {1, 1}, {2, 0}};
    const auto f = fit_line(pts);
    CHECK(f.slope == doctest::Approx(0.0));
    CHECK(f.intercept == doctest::Approx(1.0 / 3.0));
    CHECK(f.sse == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("all x equal") {
    const std::vector<P2> pts{{1, 5}, {1, 7}};
    const auto f = fit_line(pts);
    CHECK(f.slope == 0.0);
    CHECK(f.intercept == 6.0);
    CHECK(f.sse == 2.0);
  }
  SUBCASE("fewer than two points") {
    const std::vector<P2> one{{4, 9}};
    const auto f = fit_line(one);
    CHECK(f.slope == 0.0);
    CHECK(f.intercept == 0.0);
    CHECK(f.sse == 0.0);
    CHECK(fit_line(std::span<const P2>{}).sse == 0.0);
  }
}

TEST_CASE("fit_line matches the normal equations (random)") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<P2> pts(2 + rng() % 40);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const auto got = fit_line(pts);
    const auto want = oracle::normal_equations(pts);
    CHECK(got.slope == doctest::Approx(want.m).epsilon(1e-9));
    CHECK(got.intercept == doctest::Approx(want.c).epsilon(1e-9));
    CHECK(got.sse == doctest::Approx(want.sse).epsilon(1e-9));
    CHECK(got.sse >= 0.0);
  }
}

TEST_CASE("path length") {
  const std::vector<P2> tri{{0, 0}, {3, 4}};
  CHECK(path_length<2>(tri) == 5.0);
  CHECK(path_length<2>(std::span<const P2>(tri).first(1)) == 0.0);

  const auto& rows = fixture::example_printed_rows();
  CHECK(path_length<6>(rows) == doctest::Approx(fixture::kExamplePathLength).epsilon(1e-3 / 20.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<P2> pts(1 + rng() % 30), moved, scaled;
    for (auto& p : pts) p = {u(rng), u(rng)};
    double brute = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) brute += oracle::dist(pts[k], pts[k - 1]);
    for (const auto& p : pts) {
      moved.push_back({p[0] + 7.5, p[1] - 3.0});
      scaled.push_back({p[0] * 2.5, p[1] * 2.5});
    }
    const double len = path_length<2>(pts);
    CHECK(len == doctest::Approx(brute));
    CHECK(path_length<2>(moved) == doctest::Approx(len));
    CHECK(path_length<2>(scaled) == doctest::Approx(2.5 * len));
  }
}

TEST_CASE("PCA on rank-one data") {
  Eigen::MatrixXd m(4, 2);
  m << 0, 0, 1, 1, 2, 2, 3, 3;
  const auto model = fit_pca2(m);
  REQUIRE_FALSE(model.degenerate);
  CHECK(model.components(0, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(model.components(0, 1) == doctest::Approx(std::sqrt(0.5)));
  const auto scores = project_rows(model, m);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(scores(i, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("PCA degenerate models project to the origin") {
  Eigen::MatrixXd one(1, 3);
  one << 1, 2, 3;
  const auto m1 = fit_pca2(one);
  CHECK(m1.degenerate);
  const std::vector<double> x{5, 6, 7};
  CHECK(project_pca2(m1, x) == std::array<double, 2>{0.0, 0.0});

  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(5, 3, 2.0);
  CHECK(fit_pca2(flat).degenerate);
  CHECK(project_pca2(degenerate_pca2(3), x) == std::array<double, 2>{0.0, 0.0});
  CHECK_THROWS_AS(project_pca2(degenerate_pca2(4), x), std::invalid_argument);
}

TEST_CASE("PCA raw-variance mode finds the long axis") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd m(500, 2);
  for (Eigen::Index i = 0; i < 500; ++i) {
    m(i, 0) = 3.0 * z(rng);
    m(i, 1) = z(rng);
  }
  const auto model = fit_pca2(m, PcaOptions{false});
  const double angle = std::acos(std::min(1.0, std::abs(model.components(0, 0)))) * 180.0 / M_PI;
  CHECK(angle < 5.0);
}

TEST_CASE("PCA agrees with a Jacobi eigen oracle (random)") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 30 + static_cast<Eigen::Index>(rng() % 50);
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 8);
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = z(rng) * (1.0 + j) + (j > 0 ? 0.7 * m(i, 0) : 0.0);

    // correlation matrix by hand
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) mean[j] += m(i, j);
      mean[j] /= n;
      for (Eigen::Index i = 0; i < n; ++i) sd[j] += (m(i, j) - mean[j]) * (m(i, j) - mean[j]);
      sd[j] = std::sqrt(sd[j] / (n - 1));
    }
    std::vector<std::vector<double>> corr(d, std::vector<double>(d, 0.0));
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        for (Eigen::Index i = 0; i < n; ++i)
          corr[a][b] += (m(i, a) - mean[a]) / sd[a] * (m(i, b) - mean[b]) / sd[b];
        corr[a][b] /= (n - 1);
      }
    const auto [vals, vecs] = oracle::jacobi_eigen(corr);
    const auto model = fit_pca2(m);
    for (int k = 0; k < 2; ++k) {
      CHECK(model.eigenvalues[k] == doctest::Approx(vals[k]).epsilon(1e-8));
      // same axis up to sign; then the sign convention decides
      double dot = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) dot += model.components(k, j) * vecs[j][k];
      CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-6));
      Eigen::Index big = 0;
      for (Eigen::Index j = 1; j < d; ++j)
        if (std::abs(model.components(k, j)) > std::abs(model.components(k, big))) big = j;
      CHECK(model.components(k, big) > 0.0);
    }
    const auto scores = project_rows(model, m);
    CHECK(std::abs(scores.col(0).mean()) < 1e-8);
    CHECK(std::abs(scores.col(1).mean()) < 1e-8);
    CHECK(scores.col(0).squaredNorm() >= scores.col(1).squaredNorm() - 1e-9);
  }
}

TEST_CASE("PCA projection preserves distances in a full-rank 2D fit") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd m(40, 2);
  for (Eigen::Index i = 0; i < 40; ++i) {
    m(i, 0) = 4.0 * z(rng) + 1.0;
    m(i, 1) = z(rng) - 2.0;
  }
  const auto model = fit_pca2(m);
  const auto s = project_rows(model, m);
  CHECK(project_pca2(model, std::vector<double>{model.mean(0), model.mean(1)})[0] ==
        doctest::Approx(0.0));
  for (Eigen::Index i = 0; i < 40; ++i)
    for (Eigen::Index j = 0; j < 40; ++j) {
      const double zx = (m(i, 0) - m(j, 0)) / model.scale(0);
      const double zy = (m(i, 1) - m(j, 1)) / model.scale(1);
      const double dz = std::hypot(zx, zy);
      const double ds = std::hypot(s(i, 0) - s(j, 0), s(i, 1) - s(j, 1));
      CHECK(ds == doctest::Approx(dz).epsilon(1e-9));
    }
}

TEST_CASE("homogenization keeps the zero-block layout") {
  auto records = fixture::example_records();
  auto ctx = fixture::example_context();
  const auto slice = merge_streams({records, ctx});
  const auto rows = homogenize(slice, fit_tcp_pca(slice), fit_udp_pca(slice));
  REQUIRE(rows.contains("N1"));
  const auto& n1 = rows.at("N1");
  REQUIRE(n1.size() == 3);
  CHECK(n1[0].values() == std::array<double, 6>{10, 12, 0, 0, 0, 0});
  CHECK(n1[1].values()[0] == 0.0);
  CHECK(n1[1].values()[1] == 0.0);
  CHECK(n1[1].values()[4] == 0.0);
  CHECK(n1[1].values()[5] == 0.0);
  CHECK((n1[1].tcp_pc1 != 0.0 || n1[1].tcp_pc2 != 0.0));
  CHECK(n1[2].values()[0] == 0.0);
  CHECK(n1[2].values()[1] == 0.0);
  CHECK(n1[2].values()[2] == 0.0);
  CHECK(n1[2].values()[3] == 0.0);
  CHECK((n1[2].udp_pc1 != 0.0 || n1[2].udp_pc2 != 0.0));
}

TEST_CASE("homogenization grouping and ARP-only data") {
  std::vector<ProtocolRecord> v{{5, "B", ArpFeatures{2, 1}},
                                {1, "A", ArpFeatures{1, 1}},
                                {3, "B", ArpFeatures{3, 3}},
                                {4, "A", ArpFeatures{4, 2}}};
  const auto s = merge_streams({v});
  const auto tcp = fit_tcp_pca(s);
  const auto udp = fit_udp_pca(s);
  CHECK(tcp.degenerate);
  CHECK(udp.degenerate);
  const auto rows = homogenize(s, tcp, udp);
  REQUIRE(rows.size() == 2);
  CHECK(rows.at("A")[0].timestamp == 1);
  CHECK(rows.at("A")[1].timestamp == 4);
  CHECK(rows.at("B")[0].timestamp == 3);
  for (const auto& [node, rs] : rows)
    for (const auto& r : rs) {
      CHECK(r.tcp_pc1 == 0.0);
      CHECK(r.udp_pc2 == 0.0);
    }
}

TEST_CASE("metamorphosis of the worked example rows") {
  std::vector<HomogenizedRow> rows(3);
  const auto& printed = fixture::example_printed_rows();
  const Seconds ts[] = {30, 55, 85};
  const Protocol ps[] = {Protocol::Arp, Protocol::Tcp, Protocol::Udp};
  for (int i = 0; i < 3; ++i) {
    rows[i].timestamp = ts[i];
    rows[i].node = "N1";
    rows[i].protocol = ps[i];
    rows[i].arp_count = printed[i][0];
    rows[i].arp_degree = printed[i][1];
    rows[i].tcp_pc1 = printed[i][2];
    rows[i].tcp_pc2 = printed[i][3];
    rows[i].udp_pc1 = printed[i][4];
    rows[i].udp_pc2 = printed[i][5];
  }
  const auto sig = metamorphose(rows, Window{0, 0, 100});
  CHECK(sig[Slot::TimeSpan] == 55.0);
  CHECK(sig[Slot::NProtocols] == 3.0);
  CHECK(sig[Slot::NTcp] == 1.0);
  CHECK(sig[Slot::NUdp] == 1.0);
  CHECK(sig[Slot::PathLenR6] == doctest::Approx(fixture::kExamplePathLength).epsilon(1e-3 / 20.0));
  for (std::size_t k = static_cast<std::size_t>(Slot::PathLenArp); k < kSignatureDims; ++k) {
    CHECK(sig.f[k] == 0.0);
  }
  CHECK_THROWS_AS(metamorphose(std::span<const HomogenizedRow>{}, Window{}), std::invalid_argument);
}

TEST_CASE("metamorphosis per-protocol features against brute force") {
  std::mt19937_64 rng(41);
  std::vector<HomogenizedRow> rows;
  std::vector<P2> arp;
  for (int k = 0; k < 7; ++k) {
    HomogenizedRow r;
    r.timestamp = 10 * k;
    r.node = "N5";
    r.arp_count = static_cast<double>(1 + rng() % 9);
    r.arp_degree = static_cast<double>(1 + rng() % 3);
    rows.push_back(r);
    arp.push_back({r.arp_count, r.arp_degree});
  }
  const auto sig = metamorphose(rows, Window{});
  double brute = 0.0;
  for (std::size_t a = 0; a < arp.size(); ++a)
    for (std::size_t b = 0; b < arp.size(); ++b)
      if (b == a + 1) brute += oracle::dist(arp[a], arp[b]);
  CHECK(sig[Slot::PathLenArp] == doctest::Approx(brute));
  CHECK(sig[Slot::PathLenR6] == doctest::Approx(brute));
  const auto line = oracle::normal_equations(arp);
  if (std::isfinite(line.m)) {
    CHECK(sig[Slot::ArpSlope] == doctest::Approx(line.m));
    CHECK(sig[Slot::ArpSse] == doctest::Approx(line.sse));
  }
  CHECK(sig[Slot::NProtocols] == 1.0);
  CHECK(sig[Slot::TimeSpan] == 60.0);
  CHECK(sig[Slot::PathLenTcp] == 0.0);
}

TEST_CASE("window signatures are a bijection with the slice's nodes") {
  std::vector<ProtocolRecord> v{{1, "N1", ArpFeatures{1, 1}}, {2, "N2", ArpFeatures{2, 2}},
                                {3, "N1", ArpFeatures{3, 1}}};
  const auto s = merge_streams({v});
  const auto sigs = window_signatures(s, Window{0, 0, 10});
  CHECK(sigs.size() == 2);
  CHECK(sigs.at("N1")[Slot::NTcp] == 0.0);
  CHECK(sigs.at("N1")[Slot::TcpSlope] == 0.0);
  CHECK(window_signatures(EventStream{}, Window{}).empty());

  std::ostringstream a, b;
  write_signatures_csv(a, sigs);
  write_signatures_csv(b, window_signatures(s, Window{0, 0, 10}));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("window,node,", 0) == 0);
}
