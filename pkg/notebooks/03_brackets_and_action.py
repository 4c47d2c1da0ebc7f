# coding: utf-8

# # Brackets, Hamiltonians and the separated action
#
# Polynomials in (q, p_alpha, p_beta, t) carry exact Gaussian-rational
# coefficients, so every identity below is checked with `==`, not a tolerance.

# In[1]:

import numpy as np

from fracmech import hamjacobi as hj
from fracmech import mechanics as mech
from fracmech.symexpr import parse, render


# ## The bracket
#
# Both momenta enter the bracket on an equal footing.

# In[2]:

for f, g in [("p_alpha", "q"), ("p_beta", "q"), ("q^2*p_alpha", "p_beta*t + 1/2*q")]:
    print(f"[{f}, {g}] =", render(mech.fp_bracket(parse(f), parse(g))))


# Antisymmetry, Leibniz, Jacobi and friends on random cubic polynomials:

# In[3]:

mech.check_bracket_axioms(seed=42, trials=100)


# ## Equations of motion from a Lagrangian
#
# The Legendre transform of the charged oscillator gives back its Hamiltonian,
# and bracketing with it yields the equations of motion.

# In[4]:

L = mech.fo_lagrangian("2", "3", "1/2", "7")
H = mech.legendre_hamiltonian(L).H
print(render(H))
print(render(mech.fp_bracket(parse("q"), H)))
print(render(mech.fp_bracket(parse("p_alpha"), H)))


# With damping the p_beta term picks up a complex coefficient. The force on
# q is unaffected.

# In[5]:

H2 = mech.legendre_hamiltonian(mech.dissipative_lagrangian("1", "3", "1/2", "1/2")).H
print(render(H2))
print(render(mech.fp_bracket(parse("p_alpha"), H2)))


# ## The separated action
#
# For the same oscillator the action splits into a part in x, a part in the
# auxiliary coordinate and -beta t. It solves the Hamilton-Jacobi equation
# wherever the square root is real.

# In[6]:

S = hj.s_fo(m_alpha=1.0, k=1.0, charge=1.0, field_E=0.5, beta_sep=20.0)
print(S.x_interval())
pts = hj.sample_admissible(S, np.random.default_rng(42), 100)
print(max(abs(hj.hj_residual(S, tuple(p))) for p in pts))


# A wave built from it with constant amplitude passes the wave-equation check
# up to finite-difference error.

# In[7]:

w = hj.WaveAnsatz(lambda x, xb, t: 1.0, S, hbar=1.0)
rel = []
for p in pts:
    r, scale = hj.wave_equation_residual(w, tuple(p), return_scale=True)
    rel.append(abs(r) / scale)
print(max(rel))


# A slope in the amplitude leaves a quantum-potential term behind in the
# real part, -hbar^2/(2m) times the slope squared.

# In[8]:

w_lin = hj.WaveAnsatz(lambda x, xb, t: 1.0 + 0.1 * xb, S, hbar=1.0)
hj.madelung_split_residuals(w_lin, tuple(pts[0]))
