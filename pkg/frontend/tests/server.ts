/** Spawns the Python service for live tests and waits for readiness. */

import { ChildProcess, spawn } from 'node:child_process';
import { once } from 'node:events';

const BOOT_SCRIPT = `
import sys
from evoform.config import ServiceConfig
from evoform.service import run

run(ServiceConfig(port=int(sys.argv[1]), seed=int(sys.argv[2])))
`;

export interface LiveServer {
  baseUrl: string;
  stop: () => Promise<void>;
}

export async function startServer(port: number, seed = 42): Promise<LiveServer> {
  const child: ChildProcess = spawn(
    'python3',
    ['-c', BOOT_SCRIPT, String(port), String(seed)],
    { stdio: ['ignore', 'pipe', 'pipe'], cwd: '..' },
  );
  let stderr = '';
  child.stderr?.on('data', (chunk) => {
    stderr += String(chunk);
  });

  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`server exited early: ${stderr}`);
    }
    try {
      const response = await fetch(`${baseUrl}/sessions/nope`);
      if (response.status === 404) break;
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }

  return {
    baseUrl,
    stop: async () => {
      child.kill('SIGTERM');
      await Promise.race([
        once(child, 'exit'),
        new Promise((resolve) => setTimeout(resolve, 3000)),
      ]);
      if (child.exitCode === null) child.kill('SIGKILL');
    },
  };
}
