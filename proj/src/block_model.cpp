#include "blockframe/block_model.hpp"

#include "blockframe/error.hpp"
#include "blockframe/log.hpp"
#include "blockframe/text.hpp"

namespace blockframe {

void BlockModel::validate() const {
  if (num_blocks < 1 || block_size < 1 || active_blocks < 1)
    throw ValidationError("block model " + to_string() + ": all counts must be positive");
  if (active_blocks > num_blocks)
    throw ValidationError("block model " + to_string() + ": more active blocks than blocks");
}

BlockModel BlockModel::parse(std::string_view s) {
  const auto parts = text::split(s, ':');
  if (parts.size() != 3)
    throw ValidationError("block model must be NB:NV:NA, got '" + std::string(s) + "'");
  BlockModel model{text::parse_int(parts[0], "NB"), text::parse_int(parts[1], "NV"),
                   text::parse_int(parts[2], "NA")};
  model.validate();
  if (model.active_blocks == 1)
    warn("block model " + model.to_string() + " has a single active block (N_A > 1 is the usual setting)");
  return model;
}

std::string BlockModel::to_string() const {
  return std::to_string(num_blocks) + ":" + std::to_string(block_size) + ":" +
         std::to_string(active_blocks);
}

}  // namespace blockframe
