#pragma once

#include <string>

#include "gips/graph/model.hpp"
#include "gips/overlay/metamodel.hpp"

namespace testing {

using namespace gips;
using namespace gips::graph;

inline Model empty_overlay() { return Model(overlay::overlay_metamodel()); }

inline void add_client(Model& m, const std::string& id, double up = 20, double down = 100,
                       bool rc = false, bool connected = false) {
  m.mutate(change::CreateNode{id, "Client",
                              {{"rc", rc}, {"connected", connected}, {"upload", up},
                               {"download", down}, {"slots", std::int64_t{8}}}});
}

inline void add_server(Model& m, double up = 150, double size = 100) {
  m.mutate(change::CreateNode{"server", "LectureStudioServer", {{"upload", up}, {"slots", std::int64_t{10}}}});
  m.mutate(change::CreateNode{"data", "Data", {{"size", size}}});
  m.mutate(change::CreateEdge{"server-data", "data", "server", "data"});
}

}  // namespace testing
