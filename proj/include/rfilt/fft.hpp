#pragma once

// Thin FFTW wrapper over ComplexVolume. Transforms run over the axes below the
// grid rank; plans are cached per shape and created under a lock, execution is
// reentrant.

#include "rfilt/image.hpp"

namespace rfilt::fft {

/// In-place unnormalised forward DFT: F[v] = sum_k f[k] exp(-j <v, k>).
void forward(ComplexVolume& volume);

/// In-place inverse DFT including the 1/N normalisation.
void inverse(ComplexVolume& volume);

}  // namespace rfilt::fft
