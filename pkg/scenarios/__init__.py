# Scenario configuration, figure presets and data export
