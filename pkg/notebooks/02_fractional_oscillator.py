# coding: utf-8

# # The fractional oscillator as a fixed point
#
# The boundary-value problem is rewritten as x = F0 + omega^2 K x, where K is
# a left integral followed by a right integral, and solved by plain iteration.
# Iteration is only safe when the sup-norm bound on omega^2 K stays at or
# below one.

# In[1]:

import math

import numpy as np

from fracmech import fracops as fo
from fracmech.oscillator import (
    NonContractive,
    OscillatorParams,
    el_residual,
    fixed_point_defect,
    solve_fo,
)


# ## Order one
#
# With alpha = 1 both integrals are ordinary ones and the problem is the
# harmonic oscillator with x(0) = 1 and x'(1) = 0.

# In[2]:

p = OscillatorParams(m_alpha=1.0, k=1.0, charge=0.0, field_E=0.0, order=1.0,
                     grid=fo.Grid(0.0, 1.0, 1024), e0=1.0, e1=0.0)
report = solve_fo(p)
t = p.grid.nodes
exact = np.cos(t) + math.tan(1.0) * np.sin(t)
print(report.iterations, np.max(np.abs(report.solution.values - exact)))


# The bound is exactly one here. The iteration still converges because the
# bound is far from sharp.

# In[3]:

p.contraction_estimate


# ## A genuinely fractional case
#
# Shrinking the interval brings the bound down and convergence becomes fast.

# In[4]:

q = OscillatorParams(1.0, 1.0, 1.0, 0.1, 0.8, fo.Grid(0.0, 0.5, 1024), e0=1.0, e1=0.0)
rep = solve_fo(q)
print(q.contraction_estimate, rep.iterations)


# Successive increments shrink by a factor below the bound.

# In[5]:

inc = np.asarray(rep.increments)
print(inc[1:6] / inc[:5])


# The answer can be checked without knowing it in closed form: plug it back
# into the fixed-point map and into the Euler-Lagrange operator.

# In[6]:

print(fixed_point_defect(rep.solution, q))
res = el_residual(rep.solution, q).values
band = slice(51, -51)
print(np.max(np.abs(res[band])) / rep.residual_scale, rep.transversality_error)


# ## Refusal
#
# On [0, 1] with alpha = 0.8 the bound is 1/Gamma(1.8)^2, which is above one.

# In[7]:

r = OscillatorParams(1.0, 1.0, 0.0, 0.0, 0.8, fo.Grid(0.0, 1.0, 256), e0=1.0)
try:
    solve_fo(r)
except NonContractive as exc:
    print(exc.contraction_estimate, 1 / math.gamma(1.8) ** 2)
