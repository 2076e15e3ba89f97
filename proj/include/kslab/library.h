#ifndef KSLAB_LIBRARY_H_
#define KSLAB_LIBRARY_H_

#include <optional>
#include <string>
#include <vector>

#include "kslab/bits.h"
#include "kslab/machine.h"

namespace kslab {

// Description code of the reference interpreter. A description r is either
//   "11" ++ serialize_machine(m)       any machine m, or
//   a short library code               one of the machines below.
// Library codes never start with "11", so the two routes do not overlap.
struct LibraryMachine {
  std::string name;
  BitString code;
  MachineSpec spec;
};

const std::vector<LibraryMachine>& machine_library();
const LibraryMachine& library_machine(const std::string& name);

std::optional<MachineSpec> decode_description(const BitString& r);
// Shortest description of `spec`: its library code when it is one of the
// library machines, otherwise the general route.
BitString describe(const MachineSpec& spec);

// Copies the program tape to the output. Four states, no stack use.
MachineSpec echo_machine();
// Copies the condition tape to the output.
MachineSpec echo_condition_machine();
// All-Halt machine with one state.
MachineSpec halt_machine();

}  // namespace kslab

#endif  // KSLAB_LIBRARY_H_
