"""Cost evaluation and optimizers for the Robin control problem."""
