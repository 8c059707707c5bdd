# Time-domain reference solver
