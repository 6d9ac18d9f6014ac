#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "pokerl/error.hpp"
#include "pokerl/observation.hpp"

namespace pokerl {

/// Binary PGM ("P5"), 80x72, maxval 255.
inline void write_pgm(std::ostream& out, const Frame& f) {
  out << "P5\n" << kFrameCols << ' ' << kFrameRows << "\n255\n";
  out.write(reinterpret_cast<const char*>(f.px.data()), static_cast<std::streamsize>(f.px.size()));
}

inline void save_pgm(const std::filesystem::path& path, const Frame& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_pgm(out, f);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace pokerl
