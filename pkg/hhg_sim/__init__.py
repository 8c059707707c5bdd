# Floquet HHG simulator
