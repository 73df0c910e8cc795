#!/usr/bin/env python3
"""Adaptive ansatz growth on H2: one double excitation is already exact.

The restricted pool for H2/STO-3G holds two singles and one double. The
gradient screen picks the double first, and a single angle reaches the
FCI energy to numerical precision, so the loop stops on its gradient
threshold right after.
"""

import oada

path = oada.fixture_path("h2_0.7414")
mol = oada.to_spin_orbital(oada.read_fcidump(path))
ham = oada.jw_hamiltonian(mol)
pool = oada.build_pool(mol.n_spin_orbitals, mol.n_electrons)

print("operator pool:")
for op in pool:
    print(f"  id={op.id} {op.kind} {op.excitation.indices()} ({op.cnot_cost} CNOTs)")

e_fci, _ = oada.fci_ground_state(mol)
ansatz, trace = oada.run_adapt(ham, pool, n_electrons=mol.n_electrons,
                               eps=1e-8, max_ops=5, e_ref=e_fci)

print("\ntrace:")
print(trace.to_csv())
print(f"stopped on: {trace.stop_reason}")
print(f"final error vs FCI: {trace.final_energy - e_fci:.2e} Ha")
for exc, theta in zip(ansatz.excitations, ansatz.thetas):
    print(f"ansatz entry: {exc.kind} {exc.indices()}  theta = {theta:+.8f}")
