// Builds Blur-JPEG behaviour curves for one pristine image, fits Model 1 on
// them and compares its AS_FD predictions against RS_FD alone.
//
//   fit_curves [image.png]

#include <cmath>
#include <cstdio>
#include <exception>

#include "driqa/distortions.hpp"
#include "driqa/fr_metrics.hpp"
#include "driqa/image.hpp"
#include "driqa/image_io.hpp"
#include "driqa/models.hpp"

using namespace driqa;

int main(int argc, char** argv) {
  try {
    const char* path = argc > 1 ? argv[1] : DRIQA_DEMO_IMAGE;
    const ImagePlane pr = quantize8(load_plane(path));
    const Seed seed = 1;

    std::vector<CurveGroup> groups;
    std::vector<std::vector<ScoreTriple>> triples;
    for (int l1 : {2, 5, 8, 11}) {
      CurveGroup g;
      std::vector<ScoreTriple> row;
      for (int l2 = 1; l2 <= kStage2Levels; l2 += 2) {
        const auto r = run_two_stage(pr, ComboType::BlurJpeg, l1, l2, seed);
        const auto t = score_triple(pr, quantize8(r.dr), quantize8(r.fd), FrBackend::Ssim);
        g.as_dr = t.as_dr;
        g.rs_fd.push_back(t.rs_fd);
        g.as_fd.push_back(t.as_fd);
        row.push_back(t);
      }
      groups.push_back(g);
      triples.push_back(row);
    }

    const auto fit = fit_model1(groups);
    std::printf("Model 1: P1 = %.4f  P2 = %.4f  (tier-2 R^2 %.3f)\n\n", fit.params.p1, fit.params.p2, fit.tier2_r2);
    std::printf("%6s %8s %8s %8s %10s\n", "AS_DR", "RS_FD", "AS_FD", "Model1", "|err| RS");
    double err_model = 0.0, err_rs = 0.0;
    int n = 0;
    for (const auto& row : triples)
      for (const auto& t : row) {
        const double pred = model1_predict(fit.params, t.as_dr, t.rs_fd);
        std::printf("%6.3f %8.4f %8.4f %8.4f %10.4f\n", t.as_dr, t.rs_fd, t.as_fd, pred, std::abs(t.rs_fd - t.as_fd));
        err_model += std::abs(pred - t.as_fd);
        err_rs += std::abs(t.rs_fd - t.as_fd);
        ++n;
      }
    std::printf("\nmean |AS_FD - prediction|: Model 1 %.4f, RS_FD alone %.4f\n", err_model / n, err_rs / n);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fit_curves: %s\n", e.what());
    return 1;
  }
}
