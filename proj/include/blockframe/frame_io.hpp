#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "blockframe/frames.hpp"

namespace blockframe {

/// Line-oriented frame file:
///
///   frame v1 base=hadamard N=16 M=6 NB=4
///   rows: 0,2,5,6,14,15
///   perm: 0,1,...,15
///
/// Frames without a spec are written with base=custom and a `matrix:`
/// section of M lines holding N comma-separated re+imj values. Lines
/// starting with '#' are comments. The file stores N_B only; the number of
/// active blocks comes from the caller.
std::string format_frame(const Frame& frame, std::string_view comment = {});
Frame parse_frame(std::string_view text, int active_blocks, std::string_view origin = "<frame>");

void save_frame(const std::filesystem::path& path, const Frame& frame, std::string_view comment = {});
Frame load_frame(const std::filesystem::path& path, int active_blocks);

std::string format_complex(cplx z);
cplx parse_complex(std::string_view text, std::string_view what);

}  // namespace blockframe
