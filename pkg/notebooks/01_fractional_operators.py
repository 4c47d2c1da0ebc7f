# coding: utf-8

# # Fractional operators on a uniform grid
#
# Sampled functions live on a `Grid(a, b, n)`. Every operator takes a
# `SampledFunction` and an order in (0, 1] and returns another one on the same
# grid.

# In[1]:

import math

import numpy as np

from fracmech import fracops as fo

grid = fo.Grid(0.0, 1.0, 256)
t = grid.nodes
t[:4], t[-1]


# ## Integrating a power
#
# The left integral of order alpha maps (t - a)^2 to
# Gamma(3) / Gamma(3 + alpha) (t - a)^(2 + alpha).

# In[2]:

alpha = 0.5
f = fo.SampledFunction(grid, t**2)
approx = fo.left_rl_integral(f, alpha).values
exact = math.gamma(3) / math.gamma(3 + alpha) * t ** (2 + alpha)
print(np.max(np.abs(approx - exact)))


# The same oracle is available symbolically. A power expansion is written in
# the text form the command line uses:

# In[3]:

expr = fo.parse_power_expansion("1*(t-a)^2 + 0.5*(t-a)^1")
oracle = fo.power_oracle(expr, fo.OpKind.LEFT_CAPUTO, alpha)
print(oracle)


# In[4]:

num = fo.left_caputo(fo.evaluate(expr, grid), alpha).values
ref = fo.evaluate(oracle, grid).values
band = slice(13, -13)  # skip the first and last 5% of nodes
print(np.max(np.abs(num - ref)[band] / np.abs(ref)[band]))


# ## Constants
#
# Caputo kills constants; Riemann-Liouville does not.

# In[5]:

c = fo.SampledFunction(grid, np.full(t.shape, 3.0))
print(np.max(np.abs(fo.left_caputo(c, alpha).values)))
with np.errstate(divide="ignore"):
    rl = fo.left_rl_derivative(c, alpha).values
print(rl[0], rl[1:4])


# ## Left and right
#
# Reversing a function swaps the two endpoints, so the right operators are the
# left ones read backwards. The agreement is exact, not approximate.

# In[6]:

rng = np.random.default_rng(0)
g = fo.SampledFunction(grid, rng.standard_normal(grid.n + 1))
right = fo.right_rl_integral(g, 0.3).values
mirrored = fo.left_rl_integral(g.reversed(), 0.3).values[::-1]
np.array_equal(right, mirrored)


# ## Convergence of the L1 scheme
#
# Halving the step should shrink the error by about 2^(2 - alpha).

# In[7]:

for n in (64, 128, 256, 512):
    gr = fo.Grid(0.0, 1.0, n)
    s = gr.nodes
    d = fo.left_caputo(fo.SampledFunction(gr, s**2), alpha).values
    e = 2 / math.gamma(3 - alpha) * s ** (2 - alpha)
    print(n, np.max(np.abs(d - e)))
