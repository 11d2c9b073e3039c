import sys

from coin_duel.cli import main

sys.exit(main())
