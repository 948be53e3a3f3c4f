import sys

from noisyclimb.cli import main

sys.exit(main())
