// Detects the rim of three holes cut into a sphere, then clusters two
// Gaussians after peeling their boundary points.

#include <cstdio>

#include "lodd/lodd.hpp"

int main() {
  const lodd::GeneratedSet sphere = lodd::gen_sphere_holes(5000, 3, 0.3, 1);
  const auto& truth = *sphere.boundary_truth;
  lodd::Index rim = 0;
  for (bool b : truth) rim += b ? 1 : 0;
  const double ratio = static_cast<double>(rim) / static_cast<double>(sphere.points.size());

  const lodd::DetectionResult r = lodd::detect(sphere.points, lodd::Params::fixed_ratio(30, ratio));
  lodd::Index agree = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) agree += r.boundary_mask[i] == truth[i] ? 1 : 0;
  std::printf("sphere: n=%td rim=%td detected=%td agreement=%.4f\n", sphere.points.size(), rim, r.boundary_count,
              static_cast<double>(agree) / static_cast<double>(truth.size()));

  const lodd::PointSet blobs = lodd::gen_mixture(2, 200, 2, 6.0, 1.0, 42).points;
  const lodd::ClusterAssignment a = lodd::peel_cluster(blobs, lodd::Params::fixed_ratio(20, 0.3), 2);
  std::printf("mixture: ACC=%.4f NMI=%.4f\n", lodd::acc(*blobs.labels(), a.label_of),
              lodd::nmi(*blobs.labels(), a.label_of));
  return 0;
}
