using UnityEngine;

public class GameManager : MonoBehaviour
{
    public static GameManager Instance { get; private set; }

    [SerializeField] private int startingLives = 3;
    [SerializeField] private float respawnDelay = 1.5f;

    private int score;
    private int livesRemaining;
    private bool isPaused;

    private void Awake()
    {
        if (Instance != null && Instance != this)
        {
            Destroy(gameObject);
            return;
        }
        Instance = this;
        DontDestroyOnLoad(gameObject);
        livesRemaining = startingLives;
    }

    public void StartGame()
    {
        score = 0;
        livesRemaining = startingLives;
        isPaused = false;
        Time.timeScale = 1f;
    }

    public void PauseGame()
    {
        isPaused = true;
        Time.timeScale = 0f;
    }

    public void ResumeGame()
    {
        isPaused = false;
        Time.timeScale = 1f;
    }

    public void AddScore(int amount)
    {
        score += amount;
    }

    public void LoseLife()
    {
        livesRemaining -= 1;
        if (livesRemaining <= 0)
        {
            GameOver();
        }
    }

    public bool IsPaused()
    {
        return isPaused;
    }

    public int GetScore()
    {
        return score;
    }

    private void GameOver()
    {
        Time.timeScale = 0f;
        Debug.Log("Game over with score " + score);
    }
}
