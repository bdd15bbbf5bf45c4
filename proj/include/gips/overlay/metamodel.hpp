#pragma once

#include <memory>

#include "gips/graph/model.hpp"

namespace gips::overlay {

// Network, LectureStudioServer, Client, Connection, P2PLink, Data, Time.
std::shared_ptr<const graph::Metamodel> overlay_metamodel();

}  // namespace gips::overlay
