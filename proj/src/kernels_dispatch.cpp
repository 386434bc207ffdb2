#include <cstdlib>
#include <cstring>

#include "ocsim/kernels.hpp"

namespace ocsim::kern {

const Ops* avx2_ops_if_supported();
const Ops* neon_ops_if_supported();

std::vector<const Ops*> available_ops() {
  std::vector<const Ops*> out{&scalar_ops()};
  if (const Ops* o = avx2_ops_if_supported()) out.push_back(o);
  if (const Ops* o = neon_ops_if_supported()) out.push_back(o);
  return out;
}

namespace {

const Ops* pick_active() {
  std::vector<const Ops*> avail = available_ops();
  if (const char* want = std::getenv("OCSIM_KERNEL")) {
    for (const Ops* o : avail)
      if (std::strcmp(o->name, want) == 0) return o;
    return &scalar_ops();
  }
  return avail.back();
}

}  // namespace

const Ops& active_ops() {
  static const Ops* active = pick_active();
  return *active;
}

}  // namespace ocsim::kern
