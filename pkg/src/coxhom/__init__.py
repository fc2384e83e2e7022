"""p-local homology of Coxeter groups at odd primes."""
