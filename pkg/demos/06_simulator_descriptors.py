"""Qualitative comparison of simulators from machine-readable descriptors.

Loads the three bundled descriptor files and renders the criteria matrix.
Descriptors are plain YAML; writing one for another simulator and passing
it to `wsnsim describe compare` extends the comparison.
"""

from wsnsim.evalkit import comparison_table, load_bundled

descriptors = [load_bundled(name) for name in ("tossim", "ns2", "omnetpp-inet")]
matrix = comparison_table(descriptors)
print(matrix.text())

print("Energy-model cells, unpacked:")
for d in descriptors:
    print(f"  {d.name:>14}: battery={d.energy.battery.value}, "
          f"rf_states={d.energy.rf_states}, harvester={d.energy.harvester}"
          + (f", limitations: {d.energy.limitations}" if d.energy.limitations else ""))
