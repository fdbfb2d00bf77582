# Three-species loop with one inhibition: a feeds b, b regenerates a and
# c, and c shuts the first reaction down.
species a, b, c
a1: reactants {a} inhibitors {c} products {b}
a2: reactants {b} inhibitors {} products {a, c}
