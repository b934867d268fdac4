#pragma once

namespace oqsync {

/// Engine version string (git describe when built from a checkout),
/// recorded in run manifests and trajectory sidecars.
const char* engine_version();

}  // namespace oqsync
