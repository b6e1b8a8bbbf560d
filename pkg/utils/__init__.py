# Logging, configuration and report output for the timechange harness
