#include "gips/overlay/metamodel.hpp"

namespace gips::overlay {

std::shared_ptr<const graph::Metamodel> overlay_metamodel() {
  using graph::AttrDef;
  static const auto mm = std::make_shared<const graph::Metamodel>(
      std::vector<graph::NodeTypeDef>{
          {"Network", {}},
          {"LectureStudioServer", {{"upload", AttrKind::Real}, {"slots", AttrKind::Int}}},
          {"Client",
           {{"rc", AttrKind::Bool},
            {"connected", AttrKind::Bool},
            {"upload", AttrKind::Real},
            {"download", AttrKind::Real},
            {"slots", AttrKind::Int}}},
          {"Connection", {{"bw", AttrKind::Real}}},
          {"P2PLink", {{"bw", AttrKind::Real}}},
          {"Data", {{"size", AttrKind::Real}}},
          {"Time", {{"t", AttrKind::Real}}},
      },
      std::vector<graph::EdgeTypeDef>{
          {"server", "Network", "LectureStudioServer"},
          {"time", "Network", "Time"},
          {"clients", "LectureStudioServer", "Client"},
          {"data", "LectureStudioServer", "Data"},
          {"source", "Connection", "LectureStudioServer"},
          {"target", "Connection", "Client"},
          {"source", "P2PLink", "Client"},
          {"target", "P2PLink", "Client"},
      });
  return mm;
}

}  // namespace gips::overlay
