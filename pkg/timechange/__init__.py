"""Time-changed Brownian motion B^H_(V(t)): variance functions, samplers and graph estimators."""
