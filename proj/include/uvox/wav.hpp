// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "uvox/waveform.hpp"

namespace uvox {

enum class WavEncoding { Pcm16, Float32 };

// Mono RIFF/WAVE only. Float32 is lossless for float-valued samples; PCM16
// quantizes with error at most 1/32768 per sample.
Waveform load_wav(const std::string& path);
void save_wav(const Waveform& w, const std::string& path,
              WavEncoding enc = WavEncoding::Float32);

}  // namespace uvox
