# Floquet spectral analysis application
