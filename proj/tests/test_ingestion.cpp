#include "porograph/fixtures.hpp"
#include "porograph/ingestion.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <tiffio.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

using namespace porograph;
using testutil::TempDir;

TEST_CASE("segment_frame thresholds inclusively") {
  CHECK_FALSE(segment_frame(testutil::filled(4, 3, 1.0f), 0.5).any());
  CHECK(segment_frame(testutil::filled(4, 3, 0.0f), 0.5).all());

  IntensityGrid row(1, 3);
  row << 0.2f, 0.6f, 0.9f;
  const BinaryFrame b = segment_frame(row, 0.7);
  CHECK(b(0, 0));
  CHECK(b(0, 1));
  CHECK_FALSE(b(0, 2));

  IntensityGrid edge(1, 1);
  edge << 0.5f;
  CHECK(segment_frame(edge, 0.5)(0, 0));
}

TEST_CASE("segment_frame is idempotent on its own rendering") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0, 1);
  IntensityGrid f(17, 23);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
  for (double beta : {0.1, 0.5, 0.9}) {
    const BinaryFrame once = segment_frame(f, beta);
    const IntensityGrid rendered = (!once).cast<float>();  // dark -> 0, light -> 1
    CHECK((segment_frame(rendered, beta) == once).all());
  }
}

TEST_CASE("segment_frame has no spatial coupling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(0, 1);
  IntensityGrid f(9, 11);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(f.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  IntensityGrid g(f.rows(), f.cols());
  for (Eigen::Index i = 0; i < f.size(); ++i) g.data()[i] = f.data()[perm[static_cast<std::size_t>(i)]];
  const BinaryFrame bf = segment_frame(f, 0.4), bg = segment_frame(g, 0.4);
  for (Eigen::Index i = 0; i < f.size(); ++i) CHECK(bg.data()[i] == bf.data()[perm[static_cast<std::size_t>(i)]]);
}

TEST_CASE("config text parsing and validation") {
  const auto entries = parse_config_text("# comment\nbeta = 0.3\n\ngamma=50  # trailing\ninlet = 0,0,2,10\n");
  REQUIRE(entries.size() == 3);
  DatasetConfig c;
  for (const auto& [k, v] : entries) CHECK(c.apply(k, v));
  CHECK(c.threshold_beta == doctest::Approx(0.3));
  CHECK(c.gamma == 50);
  CHECK(c.inlet_region == PixelRect{0, 0, 2, 10});
  CHECK_FALSE(c.apply("no_such_key", "1"));

  DatasetConfig bad;
  bad.threshold_beta = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.gamma = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.frame_period = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.jump_ratio = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(parse_rect("1,2,3"), ConfigError);
  CHECK_THROWS_AS(c.apply("beta", "abc"), ConfigError);
  CHECK_THROWS_AS(read_config_file("/nonexistent/dataset.cfg"), IoError);
}

TEST_CASE("load_series reads frames in order") {
  TempDir dir("ingest");
  testutil::write_frames(dir.path(), {testutil::filled(4, 4, 1.0f), testutil::filled(4, 4, 1.0f),
                                      testutil::filled(4, 4, 1.0f)});
  const ImageSeries s = load_series(dir.path(), {});
  CHECK(s.last_frame() == 2);
  CHECK(s.width() == 4);
  CHECK(s.height() == 4);
  for (std::size_t t = 0; t <= s.last_frame(); ++t) CHECK((s.frame(t) == 1.0f).all());
}

TEST_CASE("load_series honours a frames.txt manifest") {
  TempDir dir("manifest");
  testutil::write_frames(dir.path(), {testutil::filled(2, 2, 0.0f), testutil::filled(2, 2, 1.0f)});
  std::ofstream(dir / "frames.txt") << testutil::frame_name(1) << '\n' << testutil::frame_name(0) << '\n';
  const ImageSeries s = load_series(dir.path(), {});
  CHECK((s.frame(0) == 1.0f).all());
  CHECK((s.frame(1) == 0.0f).all());
}

TEST_CASE("load_series errors") {
  CHECK_THROWS_AS(load_series("/nonexistent/porograph", {}), IoError);

  TempDir mismatch("mismatch");
  write_png(mismatch / testutil::frame_name(0), to_gray8(testutil::filled(4, 4, 1.0f)));
  write_png(mismatch / testutil::frame_name(1), to_gray8(testutil::filled(5, 5, 1.0f)));
  CHECK_THROWS_AS(load_series(mismatch.path(), {}), IoError);

  TempDir broken("broken");
  write_png(broken / testutil::frame_name(0), to_gray8(testutil::filled(4, 4, 1.0f)));
  std::ofstream(broken / testutil::frame_name(1)) << "not a png";
  CHECK_THROWS_AS(load_series(broken.path(), {}), IoError);

  TempDir single("single");
  write_png(single / testutil::frame_name(0), to_gray8(testutil::filled(4, 4, 1.0f)));
  CHECK_THROWS_AS(load_series(single.path(), {}), IoError);
}

TEST_CASE("decoders agree across formats and bit depths") {
  TempDir dir("formats");
  Grid<std::uint8_t> g8(3, 4);
  g8 << 0, 51, 102, 153, 204, 255, 10, 20, 30, 40, 50, 60;
  write_png(dir / "a.png", g8);
  write_pgm(dir / "a.pgm", g8);
  const IntensityGrid expect = g8.cast<float>() / 255.0f;
  CHECK((read_grayscale(dir / "a.png") == expect).all());
  CHECK((read_grayscale(dir / "a.pgm") == expect).all());
  CHECK(read_image_dimensions(dir / "a.png") == ImageDimensions{4, 3});

  // 16-bit binary PGM, big-endian samples.
  {
    std::ofstream out(dir / "b.pgm", std::ios::binary);
    out << "P5\n# sixteen\n2 1\n65535\n";
    const unsigned char px[] = {0x00, 0x00, 0xFF, 0xFF};
    out.write(reinterpret_cast<const char*>(px), sizeof px);
  }
  const IntensityGrid b = read_grayscale(dir / "b.pgm");
  CHECK(b(0, 0) == 0.0f);
  CHECK(b(0, 1) == 1.0f);

  // 16-bit TIFF.
  {
    TIFF* tif = TIFFOpen((dir / "c.tif").c_str(), "w");
    REQUIRE(tif != nullptr);
    TIFFSetField(tif, TIFFTAG_IMAGEWIDTH, 2);
    TIFFSetField(tif, TIFFTAG_IMAGELENGTH, 2);
    TIFFSetField(tif, TIFFTAG_SAMPLESPERPIXEL, 1);
    TIFFSetField(tif, TIFFTAG_BITSPERSAMPLE, 16);
    TIFFSetField(tif, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
    TIFFSetField(tif, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(tif, TIFFTAG_ROWSPERSTRIP, 2);
    std::uint16_t rows[2][2] = {{0, 65535}, {32768, 65535}};
    for (std::uint32_t r = 0; r < 2; ++r) TIFFWriteScanline(tif, rows[r], r, 0);
    TIFFClose(tif);
  }
  const IntensityGrid c = read_grayscale(dir / "c.tif");
  REQUIRE(c.rows() == 2);
  CHECK(c(0, 0) == 0.0f);
  CHECK(c(0, 1) == 1.0f);
  CHECK(c(1, 0) == doctest::Approx(32768.0 / 65535.0));
}

TEST_CASE("validate_series reports region problems") {
  const ImageSeries s = ImageSeries::from_frames({testutil::filled(10, 8, 1.0f), testutil::filled(10, 8, 1.0f)}, 1.0);
  DatasetConfig c;
  c.inlet_region = {8, 0, 5, 8};
  c.outlet_region = {0, 0, 2, 8};
  const auto report = validate_series(s, c);
  REQUIRE(report.has_errors());
  CHECK(std::any_of(report.issues.begin(), report.issues.end(),
                    [](const ValidationIssue& i) { return i.message == "inlet_region out of bounds"; }));

  c.inlet_region = {0, 0, 3, 8};
  c.outlet_region = {2, 0, 3, 8};
  CHECK(validate_series(s, c).has_errors());
}

TEST_CASE("validate_series flags an empty first frame") {
  const ImageSeries s = ImageSeries::from_frames({testutil::filled(6, 6, 0.0f), testutil::filled(6, 6, 0.0f)}, 1.0);
  DatasetConfig c;
  c.inlet_region = {0, 0, 1, 6};
  c.outlet_region = {5, 0, 1, 6};
  CHECK(validate_series(s, c).has_errors());
}

TEST_CASE("validate_series warns where the retreating blob shrinks") {
  FixtureParams p;
  p.kind = "retreating-blob";
  const Fixture f = make_fixture(p);
  const auto report = validate_series(f.series(), f.config);
  std::vector<std::size_t> warned;
  for (const auto& i : report.issues) {
    CHECK(i.severity == Severity::Warning);
    CHECK(i.message == "possible fluid retreat");
    warned.push_back(*i.frame);
  }
  // Expected frames counted from the generator's own dark fractions.
  std::vector<std::size_t> expected;
  std::vector<double> fraction;
  for (std::uint32_t t = 0; t <= f.last_frame(); ++t) {
    const IntensityGrid fr = f.frame(t);
    fraction.push_back(static_cast<double>((fr <= static_cast<float>(f.config.threshold_beta)).count()) /
                       static_cast<double>(fr.size()));
  }
  for (std::size_t t = 1; t < fraction.size(); ++t) {
    if (fraction[t - 1] > 0 && (fraction[t - 1] - fraction[t]) / fraction[t - 1] > 0.05) expected.push_back(t);
  }
  CHECK(warned == expected);
  CHECK(warned == std::vector<std::size_t>{4, 5});
}

TEST_CASE("validate_series is quiet on a clean advancing front") {
  FixtureParams p;
  p.kind = "straight-channel";
  const Fixture f = make_fixture(p);
  CHECK(validate_series(f.series(), f.config).empty());
}
