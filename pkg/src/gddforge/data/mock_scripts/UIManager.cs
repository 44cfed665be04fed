using UnityEngine;
using UnityEngine.UI;

public class UIManager : MonoBehaviour
{
    [SerializeField] private Text scoreLabel;
    [SerializeField] private Text livesLabel;
    [SerializeField] private GameObject pausePanel;
    [SerializeField] private GameObject gameOverPanel;

    private void Start()
    {
        HideAllPanels();
    }

    public void UpdateScore(int score)
    {
        if (scoreLabel != null)
        {
            scoreLabel.text = "Score: " + score;
        }
    }

    public void UpdateLives(int lives)
    {
        if (livesLabel != null)
        {
            livesLabel.text = "Lives: " + lives;
        }
    }

    public void ShowPauseMenu(bool visible)
    {
        if (pausePanel != null)
        {
            pausePanel.SetActive(visible);
        }
    }

    public void ShowGameOver()
    {
        if (gameOverPanel != null)
        {
            gameOverPanel.SetActive(true);
        }
    }

    private void HideAllPanels()
    {
        ShowPauseMenu(false);
        if (gameOverPanel != null)
        {
            gameOverPanel.SetActive(false);
        }
    }
}
