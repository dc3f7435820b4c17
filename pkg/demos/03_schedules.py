"""Tikhonov weights, step sizes and the admissibility check."""
from hvivr import ScheduleParams, beta_bregman, beta_euclid, h_bar_bound, tau_bregman, tau_euclid, validate_schedule

print([round(beta_euclid(k, delta=0.1), 4) for k in (0, 10, 100, 1000)])
print(beta_bregman(0, K=10, delta=0.1))
print(tau_euclid(2.0, theta=0.1), tau_bregman(1.0, alpha=0.9))

# sharpness rho = 1.5 needs delta > 1/3
for delta in (0.2, 0.4, 0.6):
    print(delta, validate_schedule(ScheduleParams(rho=1.5, delta=delta)) or "ok")

print(h_bar_bound(ScheduleParams(rho=2.0, delta=0.75, p_norm=1.0)))
