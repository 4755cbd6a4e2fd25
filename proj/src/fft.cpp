#include "rfilt/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace rfilt::fft {
namespace {

struct PlanKey {
  Index3 dims;
  int rank;
  int sign;
  auto tie() const { return std::tie(dims, rank, sign); }
  bool operator<(const PlanKey& o) const { return tie() < o.tie(); }
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const Grid& grid, int sign, fftw_complex* buffer) {
    const PlanKey key{grid.dims, grid.rank, sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW is row-major (last index fastest); our k1 is fastest.
    int n[3];
    for (int a = 0; a < grid.rank; ++a) n[a] = static_cast<int>(grid.dims[grid.rank - 1 - a]);
    fftw_plan plan = fftw_plan_dft(grid.rank, n, buffer, buffer, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(ComplexVolume& volume, int sign) {
  if (volume.data.empty()) return;
  auto* buf = reinterpret_cast<fftw_complex*>(volume.data.data());
  fftw_plan plan = cache().get(volume.grid, sign, buf);
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void forward(ComplexVolume& volume) { run(volume, FFTW_FORWARD); }

void inverse(ComplexVolume& volume) {
  run(volume, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(volume.data.size());
  for (auto& v : volume.data) v *= scale;
}

}  // namespace rfilt::fft
