#pragma once

#include <string>
#include <string_view>

namespace blockframe {

/// Block-erasure configuration: the N columns of a frame form `num_blocks`
/// consecutive blocks of `block_size` columns, of which `active_blocks`
/// survive each channel use.
struct BlockModel {
  int num_blocks = 1;
  int block_size = 1;
  int active_blocks = 1;

  int total_columns() const noexcept { return num_blocks * block_size; }
  int active_columns() const noexcept { return active_blocks * block_size; }
  int erased_blocks() const noexcept { return num_blocks - active_blocks; }

  /// Throws ValidationError unless all counts are positive and
  /// active_blocks <= num_blocks.
  void validate() const;

  /// Parses "NB:NV:NA", e.g. "16:4:4". A single active block is accepted
  /// with a warning.
  static BlockModel parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const BlockModel&, const BlockModel&) = default;
};

}  // namespace blockframe
