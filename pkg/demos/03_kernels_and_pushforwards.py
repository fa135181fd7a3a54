"""Kernels beyond random walks and their tameness certificates.

Shows the uniform walk, the parity-labeled chain with probabilities in tenths,
and push-forwards through two bijections of F2: the suffix swap (displacement
one, not a homomorphism) and a depth relabeling (an exact isometry of the
Cayley tree fixing the basepoint).
"""

from treewalk import (exact_distribution, kernel_from_descriptor, parse_entry,
                      sample_path, tameness_probe)

F2 = parse_entry("free:2")

srw = kernel_from_descriptor(F2, "srw:uniform")
push = kernel_from_descriptor(F2, "pushforward:suffix_swap:srw:uniform")
parity = kernel_from_descriptor(F2, "parity:0.4,0.2,0.2,0.2|0.1,0.3,0.3,0.3")

print("uniform walk one-step support at 1:",
      [(h.to_string(), p) for h, p in srw.support(F2.identity())])
print("push-forward support at 1:",
      [(h.to_string(), p) for h, p in push.support(F2.identity())])
print("note the target 'ba' with probability 1/4: no driving measure does",
      "that, so the push-forward is not a random walk")

print("\nexact 2-step return probability for the uniform walk:",
      exact_distribution(srw, F2.identity(), 2)[F2.identity()])

for kernel in (srw, push, parity):
    report = tameness_probe(kernel, atom_steps=8)
    fit = report.atom_fit
    print(f"\n{kernel.descriptor}: verdict {report.verdict}, jump bound "
          f"{report.jump_bound}, max-atom decay rho = {fit['rho']:.3f} "
          f"({report.irreducibility_note})")
    eps_a = report.irreducibility["a"]
    print(f"  irreducibility at generator a: eps = {eps_a[0]}, steps = {eps_a[1]}")

print("\nten steps of each chain from 1 (same substream for comparison):")
for kernel in (srw, push):
    path = sample_path(kernel, F2.identity(), 10, (2024, 1, 0))
    print(f"  {kernel.descriptor:42s}",
          " ".join(g.to_string() for g in path))
print("the push-forward path is the suffix-swap image of the base path,")
print("computed stepwise through the defining formula rather than by mapping")
