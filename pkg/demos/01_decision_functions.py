"""Decision functions: parse a policy, evaluate it on bits and on soft values."""

import itertools

import numpy as np

from thresholdctl import eval_boolean, eval_numeric_with_partials, parse_and_bind

names = ["kids", "weapon", "violence"]
policy = parse_and_bind("kids AND (weapon OR violence)", names)
print("parsed:", policy)
print(repr(policy))

# truth table
for bits in itertools.product([0, 1], repeat=3):
    print(dict(zip(names, bits)), "->", eval_boolean(policy, bits))

# the product form agrees with the boolean one on bits ...
bits = np.array(list(itertools.product([0, 1], repeat=3)), dtype=float)
values, _ = eval_numeric_with_partials(policy, bits)
print("numeric on all bit vectors:", values)

# ... and is differentiable in between
value, partials = eval_numeric_with_partials(policy, np.array([0.5, 0.25, 0.0]))
print("value at (0.5, 0.25, 0.0):", value)
print("partials:", partials)  # [0.25, 0.5, 0.375]

# NOT binds tightest, then AND, then OR
print(parse_and_bind("NOT kids AND weapon OR violence", names))
